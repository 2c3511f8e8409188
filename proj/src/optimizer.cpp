#include "qnl/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "qnl/errors.hpp"

namespace qnl {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Below this |Im K| / |chi_K^-1| the fixed-S_FF problem is evaluated through
// the real-gauge formulas with K' = Re K. The two agree to O((Im K)^2).
constexpr double kSmallDampingRatio = 1e-9;

double sign(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

void require_real_kernel(const GaugeKernel& g) {
  if (!g.real_only || g.kappa_eff.imag() != 0.0) {
    throw DomainError("effective back-action optimization needs a real gauge kernel");
  }
}

void require_positive(double s, const char* what) {
  if (!(s > 0.0) || !std::isfinite(s)) {
    throw DomainError(std::string(what) + " must be finite and positive, got " + std::to_string(s));
  }
}

void require_fdt(double s_ff, BackAction k, double hbar) {
  if (s_ff < hbar * std::abs(k.k.imag())) {
    throw FdtViolation("S_FF = " + std::to_string(s_ff) + " is below hbar|Im K| = " +
                       std::to_string(hbar * std::abs(k.k.imag())));
  }
}

// Combined QCRB/DQL bound at fixed S_FF; reduces to the real-gauge form when
// hbar_im_k = 0.
double fixed_backaction_bound(double dql_value, double thr, double s_ff, double hbar_im_k) {
  const double c2 = hbar_im_k * hbar_im_k;
  const double root = std::sqrt(std::max(0.0, (thr * thr - c2) * (s_ff * s_ff - c2)));
  return dql_value * (thr * thr + s_ff * s_ff - c2) / (thr * s_ff + root);
}

OptimumReport fixed_eff_impl(Complex chi_inv, const GaugeKernel& g, double s, double hbar,
                             bool sigma_zero) {
  require_real_kernel(g);
  require_positive(s, "effective back-action PSD");

  const Complex a = chi_inv + g.kappa_eff;
  OptimumReport out;
  out.constrained_sigma_zero = sigma_zero;
  out.triad_back_action = BackAction{g.kappa_eff};

  if (chi_inv.imag() == 0.0) {
    if (a == Complex{}) throw DomainError("chi_K^-1 vanishes; the QCRB is not attained");
    const double re_chi = 1.0 / a.real();
    const Complex s_xf{-s * re_chi, 0.0};
    out.optimal_triad = {(std::norm(s_xf) + 0.25 * hbar * hbar) / s, s_xf, s};
    out.s_sum = hbar * hbar * std::norm(a) / (4.0 * s);
    out.regime = Regime::QcrbLimited;
    out.s_threshold = kInf;
    out.sigma_opt = 0.0;
    return out;
  }

  const double thr = threshold_eff(chi_inv, g, hbar);
  const double dql_value = hbar * std::abs(chi_inv.imag());
  const Complex chi_eff = 1.0 / a;
  const double excess = sigma_zero ? 0.0 : std::max(0.0, s - thr);

  const Complex s_xf{-s * chi_eff.real(), -chi_eff.imag() * excess};
  const double s_xx = (std::norm(s_xf) + hbar * std::abs(s_xf.imag()) + 0.25 * hbar * hbar) / s;
  out.optimal_triad = {s_xx, s_xf, s};
  out.sigma_opt = sigma(out.optimal_triad, out.triad_back_action);
  out.s_threshold = thr;

  const double bound = 0.5 * dql_value * (thr / s + s / thr);
  if (s < thr) {
    out.s_sum = bound;
    out.regime = Regime::QcrbLimited;
  } else if (!sigma_zero || s == thr) {
    out.s_sum = dql_value;
    out.regime = Regime::DqlLimited;
  } else {
    // Over-driven: above threshold but Im S_xF pinned to zero.
    out.s_sum = bound;
    out.regime = Regime::QcrbLimited;
  }
  return out;
}

}  // namespace

const char* to_string(Regime r) {
  return r == Regime::DqlLimited ? "dql" : "qcrb";
}

double threshold_eff(Complex chi_inv, const GaugeKernel& g, double hbar) {
  require_real_kernel(g);
  if (chi_inv.imag() == 0.0) throw LosslessProbe("threshold is infinite for a lossless probe");
  const Complex chi_eff = 1.0 / (chi_inv + g.kappa_eff);
  return hbar / (2.0 * std::abs(chi_eff.imag()));
}

OptimumReport optimize_fixed_eff_backaction(Complex chi_inv, const GaugeKernel& g,
                                            double s_eff_ff, double hbar) {
  return fixed_eff_impl(chi_inv, g, s_eff_ff, hbar, false);
}

OptimumReport optimize_fixed_eff_backaction_sigma_zero(Complex chi_inv, const GaugeKernel& g,
                                                       double s_eff_ff, double hbar) {
  return fixed_eff_impl(chi_inv, g, s_eff_ff, hbar, true);
}

double threshold_full(Complex chi_inv, BackAction k, double hbar) {
  if (chi_inv.imag() == 0.0) throw LosslessProbe("threshold is infinite for a lossless probe");
  if (k.k.imag() == 0.0) return threshold_eff(chi_inv, GaugeKernel::real(k.k.real()), hbar);
  // |chi_K^-1|^2 - 2 Im chi^-1 Im K expanded without the cancelling cross term.
  const double re = chi_inv.real() + k.k.real();
  const double im = chi_inv.imag();
  const double ik = k.k.imag();
  return 0.5 * hbar * (re * re + im * im + ik * ik) / std::abs(im);
}

NoiseTriad reconstruct_fixed_backaction_triad(Complex chi_inv, BackAction k, double s_ff,
                                              double sigma_value, double hbar) {
  // With sigma fixed, Im S_xF = Im K * S_xx - sigma and the saturated
  // uncertainty relation is an ellipse in (S_xx, Re S_xF):
  //   Im^2K S_xx^2 - P S_xx + Re^2 S_xF + c0 = 0,
  // on which the sum noise is linear: A S_xx + 2 Re chi_K^-1 Re S_xF + const.
  const Complex d_k = chi_inv + k.k;
  const double im_k = k.k.imag();
  const double a_coef = std::norm(d_k) - 2.0 * d_k.imag() * im_k;
  const double b_coef = 2.0 * d_k.real() * im_k;
  const double scale = std::hypot(a_coef, b_coef);
  const double p = s_ff + 2.0 * im_k * sigma_value;
  const double c0 = sigma_value * sigma_value + hbar * std::abs(sigma_value) + 0.25 * hbar * hbar;
  const double r = std::sqrt(std::max(0.0, p * p - 4.0 * im_k * im_k * c0));

  double re_xf = 0.0;
  double s_xx = 0.0;
  if (scale == 0.0) {
    // Objective constant on the ellipse; take the small-S_xx vertex.
    s_xx = 2.0 * c0 / (p + r);
  } else {
    const double u = a_coef * r / scale;  // P - 2 Im^2K S_xx at the optimum
    re_xf = -d_k.real() * r / scale;
    if (p + u > 0.0) {
      // (P - u) / (2 Im^2K) without the cancellation at small Im K.
      const double num = d_k.real() * d_k.real() * p * p + c0 * a_coef * a_coef;
      s_xx = 2.0 * num / (scale * (p * scale + a_coef * r));
    } else {
      s_xx = (p - u) / (2.0 * im_k * im_k);
    }
  }
  return {s_xx, Complex{re_xf, im_k * s_xx - sigma_value}, s_ff};
}

OptimumReport optimize_fixed_backaction(Complex chi_inv, BackAction k, double s_ff,
                                        bool allow_sigma, double hbar) {
  require_positive(s_ff, "back-action PSD");
  require_fdt(s_ff, k, hbar);

  const Complex d_k = chi_inv + k.k;
  const double im_k = k.k.imag();

  if (chi_inv.imag() == 0.0) {
    OptimumReport out;
    out.s_sum = qcrb_lossless(chi_inv, k, s_ff, hbar);
    out.regime = Regime::QcrbLimited;
    out.s_threshold = kInf;
    out.optimal_triad = reconstruct_fixed_backaction_triad(chi_inv, k, s_ff, 0.0, hbar);
    out.sigma_opt = 0.0;
    out.constrained_sigma_zero = !allow_sigma;
    out.triad_back_action = k;
    return out;
  }

  const GaugeKernel real_gauge = GaugeKernel::real(k.k.real());
  if (im_k == 0.0) {
    OptimumReport out = fixed_eff_impl(chi_inv, real_gauge, s_ff, hbar, !allow_sigma);
    out.triad_back_action = k;
    return out;
  }

  OptimumReport out;
  out.constrained_sigma_zero = !allow_sigma;
  out.triad_back_action = k;
  const double dql_value = hbar * std::abs(chi_inv.imag());

  if (std::abs(im_k) < kSmallDampingRatio * std::abs(d_k)) {
    const OptimumReport eff = fixed_eff_impl(chi_inv, real_gauge, s_ff, hbar, !allow_sigma);
    out.s_sum = eff.s_sum;
    out.regime = eff.regime;
    out.s_threshold = eff.s_threshold;
  } else {
    const double thr = threshold_full(chi_inv, k, hbar);
    out.s_threshold = thr;
    if (s_ff < thr) {
      out.s_sum = fixed_backaction_bound(dql_value, thr, s_ff, hbar * im_k);
      out.regime = Regime::QcrbLimited;
    } else if (allow_sigma || s_ff == thr) {
      out.s_sum = dql_value;
      out.regime = Regime::DqlLimited;
    } else {
      out.s_sum = fixed_backaction_bound(dql_value, thr, s_ff, hbar * im_k);
      out.regime = Regime::QcrbLimited;
    }
  }

  if (allow_sigma && s_ff >= out.s_threshold) {
    out.sigma_opt = -sign(chi_inv.imag()) * std::abs(chi_inv.imag()) *
                    (s_ff - out.s_threshold) / std::norm(d_k);
  }
  out.optimal_triad = reconstruct_fixed_backaction_triad(chi_inv, k, s_ff, out.sigma_opt, hbar);
  return out;
}

double qcrb_simple(Complex chi_inv, BackAction k, double s_ff, double hbar) {
  require_positive(s_ff, "back-action PSD");
  return hbar * hbar * std::norm(chi_inv + k.k) / (4.0 * s_ff);
}

double qcrb_lossless(Complex chi_inv, BackAction k, double s_ff, double hbar) {
  if (chi_inv.imag() != 0.0) throw DomainError("qcrb_lossless needs Im chi^-1 == 0");
  require_positive(s_ff, "back-action PSD");
  require_fdt(s_ff, k, hbar);
  const double c = hbar * k.k.imag();
  const double root = std::sqrt(std::max(0.0, s_ff * s_ff - c * c));
  return 0.5 * hbar * hbar * std::norm(chi_inv + k.k) / (s_ff + root);
}

PhaseTransitionProbe phase_transition_probe(Complex chi_inv, BackAction k, double hbar,
                                            double step, bool allow_sigma) {
  if (chi_inv.imag() == 0.0) throw LosslessProbe("no phase transition for a lossless probe");
  require_positive(step, "finite-difference step");

  PhaseTransitionProbe out;
  const double thr = std::abs(k.k.imag()) < kSmallDampingRatio * std::abs(chi_inv + k.k)
                         ? threshold_eff(chi_inv, GaugeKernel::real(k.k.real()), hbar)
                         : threshold_full(chi_inv, k, hbar);
  out.s_threshold = thr;
  if (thr - 2.0 * step < hbar * std::abs(k.k.imag()) || !(thr - 2.0 * step > 0.0)) {
    throw DomainError("finite-difference step reaches below the FDT bound");
  }

  struct Sample {
    double s_sum;
    double im_sxf;
  };
  auto eval = [&](double s_ff) {
    const OptimumReport r = optimize_fixed_backaction(chi_inv, k, s_ff, allow_sigma, hbar);
    // In the K' = Re K gauge, Im S_xF_eff = -sigma.
    return Sample{r.s_sum, -r.sigma_opt};
  };
  const Sample m2 = eval(thr - 2.0 * step);
  const Sample m1 = eval(thr - step);
  const Sample c0 = eval(thr);
  const Sample p1 = eval(thr + step);
  const Sample p2 = eval(thr + 2.0 * step);

  const double h = step;
  out.d1_below = (3.0 * c0.s_sum - 4.0 * m1.s_sum + m2.s_sum) / (2.0 * h);
  out.d1_above = (-3.0 * c0.s_sum + 4.0 * p1.s_sum - p2.s_sum) / (2.0 * h);
  out.d1_jump = out.d1_above - out.d1_below;
  out.d2_below = (c0.s_sum - 2.0 * m1.s_sum + m2.s_sum) / (h * h);
  out.d2_above = (c0.s_sum - 2.0 * p1.s_sum + p2.s_sum) / (h * h);
  out.im_sxf_slope_below = (3.0 * c0.im_sxf - 4.0 * m1.im_sxf + m2.im_sxf) / (2.0 * h);
  out.im_sxf_slope_above = (-3.0 * c0.im_sxf + 4.0 * p1.im_sxf - p2.im_sxf) / (2.0 * h);
  out.im_sxf_slope_jump = out.im_sxf_slope_above - out.im_sxf_slope_below;
  return out;
}

}  // namespace qnl
