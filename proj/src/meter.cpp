#include "qnl/meter.hpp"

#include <algorithm>
#include <cmath>

namespace qnl {

double sigma(const NoiseTriad& triad, BackAction k) {
  return (k.k * triad.s_xx + std::conj(triad.s_xf)).imag();
}

double uncertainty_slack(const NoiseTriad& triad, BackAction k, double hbar) {
  return triad.s_xx * triad.s_ff - std::norm(triad.s_xf) - hbar * std::abs(sigma(triad, k)) -
         0.25 * hbar * hbar;
}

std::pair<double, double> local_uncertainty_pair(const NoiseTriad& triad, BackAction k,
                                                 double hbar) {
  const double im_k = k.k.imag();
  const double im_xf = triad.s_xf.imag();
  const double cross = std::norm(triad.s_xf);
  const double vacuum = 0.25 * hbar * hbar;
  const double plus = triad.s_xx * (triad.s_ff - hbar * im_k) - cross + hbar * im_xf - vacuum;
  const double minus = triad.s_xx * (triad.s_ff + hbar * im_k) - cross - hbar * im_xf - vacuum;
  return {plus, minus};
}

double sum_noise_psd(const NoiseTriad& triad, Complex chi_inv, BackAction k) {
  const Complex chi_k_inv = chi_inv + k.k;
  return std::norm(chi_k_inv) * triad.s_xx + 2.0 * (chi_k_inv * triad.s_xf).real() + triad.s_ff;
}

GaugeResult gauge_transform(const NoiseTriad& triad, BackAction k, const GaugeKernel& g) {
  const Complex delta = k.k - g.kappa_eff;
  NoiseTriad eff;
  eff.s_xx = triad.s_xx;
  eff.s_xf = std::conj(delta) * triad.s_xx + triad.s_xf;
  eff.s_ff = std::norm(delta) * triad.s_xx + 2.0 * (delta * triad.s_xf).real() + triad.s_ff;
  return {eff, g.kappa_eff};
}

GaugeKernel feedback_equivalent_gauge(BackAction k, Complex kappa) {
  return GaugeKernel::general(k.k - kappa);
}

FeedbackMeter apply_feedback(const NoiseTriad& triad, BackAction k, Complex kappa) {
  // F_fl' = F_fl + kappa x_fl
  FeedbackMeter out;
  out.k = BackAction{k.k - kappa};
  out.triad.s_xx = triad.s_xx;
  out.triad.s_xf = triad.s_xf + std::conj(kappa) * triad.s_xx;
  out.triad.s_ff = triad.s_ff + std::norm(kappa) * triad.s_xx + 2.0 * (kappa * triad.s_xf).real();
  return out;
}

CommutatorSpectra meter_commutators(BackAction k, double hbar) {
  return {Complex{0.0, 0.0}, Complex{-2.0 * hbar * k.k.imag(), 0.0}, Complex{0.0, -hbar}};
}

CommutatorCheck commutator_check(Complex chi_inv, BackAction k, double hbar) {
  const CommutatorSpectra c = meter_commutators(k, hbar);
  const Complex a = chi_inv + k.k;
  // C_Fx = conj(C_xF); the cross terms enter as a C_xF + conj(a) C_Fx.
  const Complex total =
      std::norm(a) * c.c_xx + a * c.c_xf + std::conj(a) * std::conj(c.c_xf) + c.c_ff;
  CommutatorCheck out;
  out.c_sum = total.real();
  out.c_thermal = -2.0 * hbar * chi_inv.imag();
  out.residual = out.c_sum + out.c_thermal;
  return out;
}

}  // namespace qnl
