#pragma once

// Meter-side algebra at a single frequency: noise triads, the sigma factor,
// the generalized uncertainty relation, gauge / feedback transformations,
// the sum-noise PSD and the commutator spectra.

#include <complex>
#include <utility>

namespace qnl {

using Complex = std::complex<double>;

/// Meter noise spectra at one frequency. Output is referenced to probe
/// position, so there is no separate forward gain.
struct NoiseTriad {
  double s_xx = 0.0;   // imprecision PSD
  Complex s_xf{};      // imprecision / back-action cross PSD
  double s_ff = 0.0;   // back-action force PSD

  friend bool operator==(const NoiseTriad&, const NoiseTriad&) = default;
};

/// Dynamic back action K(Omega) (Hooke sign: the meter adds K to chi^-1).
struct BackAction {
  Complex k{};
};

/// Effective dynamic back-action kernel used by the gauge transformation.
struct GaugeKernel {
  Complex kappa_eff{};
  bool real_only = false;

  /// Real-valued kernel; the restricted class used by the fixed effective
  /// back-action optimization.
  static GaugeKernel real(double kappa) { return {Complex{kappa, 0.0}, true}; }
  static GaugeKernel general(Complex kappa) { return {kappa, false}; }
};

struct CommutatorSpectra {
  Complex c_xx{};
  Complex c_ff{};
  Complex c_xf{};
};

struct CommutatorCheck {
  double c_sum = 0.0;
  double c_thermal = 0.0;
  double residual = 0.0;
};

struct GaugeResult {
  NoiseTriad triad;      // (S_xx, S_xF_eff, S_FF_eff)
  Complex chi_k_shift;   // chi_K^-1 is replaced by chi^-1 + chi_k_shift
};

/// sigma = Im{K S_xx + conj(S_xF)}
double sigma(const NoiseTriad& triad, BackAction k);

/// S_xx S_FF - |S_xF|^2 - hbar |sigma| - hbar^2/4. Non-negative for a
/// physical meter, zero for a quantum-limited one.
double uncertainty_slack(const NoiseTriad& triad, BackAction k, double hbar);

/// The two frequency-local one-sided slacks (Omega and -Omega versions):
///   first  = S_xx (S_FF - hbar Im K) - |S_xF|^2 + hbar Im S_xF - hbar^2/4
///   second = S_xx (S_FF + hbar Im K) - |S_xF|^2 - hbar Im S_xF - hbar^2/4
std::pair<double, double> local_uncertainty_pair(const NoiseTriad& triad, BackAction k,
                                                 double hbar);

/// |chi_K^-1|^2 S_xx + 2 Re{chi_K^-1 S_xF} + S_FF with chi_K^-1 = chi^-1 + K.
double sum_noise_psd(const NoiseTriad& triad, Complex chi_inv, BackAction k);

/// Reassigns imprecision and back action through the kernel g. The sum noise
/// evaluated with (result.triad, back action g.kappa_eff) equals the original.
GaugeResult gauge_transform(const NoiseTriad& triad, BackAction k, const GaugeKernel& g);

/// Kernel reproduced by a measurement-based feedback force kappa * x_out.
GaugeKernel feedback_equivalent_gauge(BackAction k, Complex kappa);

struct FeedbackMeter {
  NoiseTriad triad;
  BackAction k;
};

/// The physical meter seen by the probe once a feedback force kappa * x_out
/// is applied: K -> K - kappa, F_fl -> F_fl + kappa x_fl.
FeedbackMeter apply_feedback(const NoiseTriad& triad, BackAction k, Complex kappa);

/// Commutator spectra of (x_fl, F_fl) for a simultaneously measurable meter.
CommutatorSpectra meter_commutators(BackAction k, double hbar);

/// Commutator spectrum of the sum noise, assembled from meter_commutators,
/// against that of the probe thermal force. They must cancel.
CommutatorCheck commutator_check(Complex chi_inv, BackAction k, double hbar);

}  // namespace qnl
