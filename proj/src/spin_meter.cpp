#include "qnl/spin_meter.hpp"

#include <cmath>

#include "qnl/errors.hpp"

namespace qnl {

namespace {

struct SpinResponseEval {
  double omega;
  Complex operator()(const NegativeMassOscillator& m) const {
    if (!(omega > 0.0)) throw DomainError("spin response needs Omega > 0");
    const Complex inv{m.mass * (m.omega0 * m.omega0 - omega * omega), -m.mass * m.gamma * omega};
    if (inv == Complex{}) throw DomainError("spin response diverges at this frequency");
    return -1.0 / inv;
  }
  Complex operator()(const FixedSpinResponse& f) const { return f.chi_s; }
};

}  // namespace

Complex spin_response(const SpinResponseModel& model, double omega) {
  const Complex chi = std::visit(SpinResponseEval{omega}, model);
  if (!std::isfinite(chi.real()) || !std::isfinite(chi.imag())) {
    throw DomainError("spin response is not finite");
  }
  return chi;
}

NoiseTriad spin_triad_from_product(double theta_I, Complex theta_chi_s, double hbar) {
  if (!(theta_I > 0.0) || !std::isfinite(theta_I)) throw DomainError("theta_I must be positive");
  NoiseTriad t;
  t.s_xx = hbar / (4.0 * theta_I) *
           (1.0 + 4.0 * std::norm(theta_chi_s) + 4.0 * std::abs(theta_chi_s.imag()));
  t.s_xf = hbar * theta_chi_s;
  t.s_ff = hbar * theta_I;
  return t;
}

NoiseTriad spin_triad(const SpinMeterParams& p, double omega, double hbar) {
  if (p.theta_S < 0.0) throw DomainError("theta_S must be non-negative");
  return spin_triad_from_product(p.theta_I, p.theta_S * spin_response(p.chi_s_model, omega), hbar);
}

double matched_sum_noise(double theta_I, Complex chi_inv, double /*omega*/, double hbar) {
  if (!(theta_I > 0.0)) throw DomainError("theta_I must be positive");
  if (chi_inv == Complex{} || !std::isfinite(std::abs(chi_inv))) {
    throw DomainError("matched configuration needs a finite nonzero probe response");
  }
  return hbar * std::abs(chi_inv.imag()) + hbar * std::norm(chi_inv) / (4.0 * theta_I);
}

Complex optimal_spin_response(double theta_I, Complex chi, double /*omega*/, double /*hbar*/) {
  const double im = chi.imag();
  if (theta_I * std::abs(im) < 0.5) return {-theta_I * chi.real(), 0.0};
  const double sign = im > 0.0 ? 1.0 : (im < 0.0 ? -1.0 : 0.0);
  return -theta_I * chi + Complex{0.0, 0.5 * sign};
}

}  // namespace qnl
