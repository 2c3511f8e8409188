#pragma once

// Interferometric meter enhanced by an auxiliary spin oscillator with
// negative effective mass (back-action evading through coherent
// cancellation in the spin frame).

#include <complex>
#include <variant>

#include "qnl/meter.hpp"

namespace qnl {

/// chi_S(Omega) = -1 / (m (Omega_S^2 - Omega^2) - i m Gamma_S Omega)
struct NegativeMassOscillator {
  double mass = 1.0;
  double omega0 = 1.0;
  double gamma = 0.0;
};

/// Frequency-independent spin response, handy for spot evaluations.
struct FixedSpinResponse {
  Complex chi_s{};
};

using SpinResponseModel = std::variant<NegativeMassOscillator, FixedSpinResponse>;

Complex spin_response(const SpinResponseModel& model, double omega);

struct SpinMeterParams {
  double theta_I = 0.0;
  double theta_S = 0.0;
  SpinResponseModel chi_s_model = FixedSpinResponse{};
};

/// S_xx = (hbar / 4 theta_I)(1 + 4 theta_S^2 |chi_S|^2 + 4 theta_S |Im chi_S|),
/// S_FF = hbar theta_I, S_xF = hbar theta_S chi_S.
NoiseTriad spin_triad(const SpinMeterParams& p, double omega, double hbar);

/// Same triad parametrized by the product theta_S chi_S, which is all the
/// noise spectra depend on.
NoiseTriad spin_triad_from_product(double theta_I, Complex theta_chi_s, double hbar);

/// Sum noise with the spin response matched to the probe,
/// theta_S chi_S = -theta_I chi:  hbar |Im chi^-1| + hbar |chi^-1|^2 / (4 theta_I).
double matched_sum_noise(double theta_I, Complex chi_inv, double omega, double hbar);

/// theta_S chi_S minimizing the sum noise at S_FF = hbar theta_I.
Complex optimal_spin_response(double theta_I, Complex chi, double omega, double hbar);

}  // namespace qnl
