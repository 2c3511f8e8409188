#pragma once

// Closed-form minimization of the sum quantum noise over quantum-limited
// (saturating) meters, at fixed effective or fixed physical back-action PSD.

#include <complex>

#include "qnl/meter.hpp"

namespace qnl {

enum class Regime { QcrbLimited, DqlLimited };

const char* to_string(Regime r);

struct OptimumReport {
  double s_sum = 0.0;
  Regime regime = Regime::QcrbLimited;
  /// +inf for a lossless probe.
  double s_threshold = 0.0;
  NoiseTriad optimal_triad;
  double sigma_opt = 0.0;
  bool constrained_sigma_zero = false;
  /// Back action the triad is expressed against: the gauge kernel for the
  /// effective optimization, the physical K otherwise. sum_noise_psd and
  /// uncertainty_slack of optimal_triad should be evaluated with it.
  BackAction triad_back_action;
};

/// One row of a frequency-resolved noise budget.
struct BudgetPoint {
  double omega = 0.0;
  double sql = 0.0;
  double dql = 0.0;
  double s_thr = 0.0;
  double s_sum_opt = 0.0;
  double s_fdt = 0.0;
  double s_total = 0.0;  // s_sum_opt + s_fdt

  friend bool operator==(const BudgetPoint&, const BudgetPoint&) = default;
};

/// hbar |chi^-1 + K'|^2 / (2 |Im chi^-1|) for a real gauge kernel K'.
/// LosslessProbe when Im chi^-1 == 0, DomainError for a complex kernel.
double threshold_eff(Complex chi_inv, const GaugeKernel& g, double hbar);

/// Minimum of the sum noise at fixed effective back-action PSD s_eff_ff,
/// with Im S_xF free. Below threshold the optimum follows the combined
/// QCRB/DQL bound; at and above it the sum noise is flat at the DQL.
OptimumReport optimize_fixed_eff_backaction(Complex chi_inv, const GaugeKernel& g,
                                            double s_eff_ff, double hbar);

/// Same with the effective cross-correlation constrained to be real
/// (sigma = 0): a single minimum equal to the DQL exactly at threshold.
OptimumReport optimize_fixed_eff_backaction_sigma_zero(Complex chi_inv, const GaugeKernel& g,
                                                       double s_eff_ff, double hbar);

/// (hbar/2)(|chi_K^-1|^2 - 2 Im chi^-1 Im K) / |Im chi^-1|.
double threshold_full(Complex chi_inv, BackAction k, double hbar);

/// Minimum at fixed physical back-action PSD s_ff. Requires
/// s_ff >= hbar |Im K| (FdtViolation otherwise). A lossless probe returns the
/// QCRB branch with an infinite threshold.
OptimumReport optimize_fixed_backaction(Complex chi_inv, BackAction k, double s_ff,
                                        bool allow_sigma, double hbar);

/// hbar^2 |chi^-1 + K|^2 / (4 s_ff)
double qcrb_simple(Complex chi_inv, BackAction k, double s_ff, double hbar);

/// Tight QCRB of a lossless probe; between 1x and 2x qcrb_simple depending on
/// how close hbar |Im K| is to s_ff.
double qcrb_lossless(Complex chi_inv, BackAction k, double s_ff, double hbar);

/// Saturating triad minimizing the sum noise at fixed (s_ff, sigma). Exposed
/// for testing; the optimizers call it with their optimal sigma.
NoiseTriad reconstruct_fixed_backaction_triad(Complex chi_inv, BackAction k, double s_ff,
                                              double sigma_value, double hbar);

struct PhaseTransitionProbe {
  double s_threshold = 0.0;
  double d1_below = 0.0;
  double d1_above = 0.0;
  double d1_jump = 0.0;
  double d2_below = 0.0;
  double d2_above = 0.0;
  /// One-sided slopes of Im S_xF in the Re K gauge, d/dS_FF.
  double im_sxf_slope_below = 0.0;
  double im_sxf_slope_above = 0.0;
  double im_sxf_slope_jump = 0.0;
};

/// One-sided finite differences of the optimized sum noise in S_FF at the
/// threshold, using second-order stencils with absolute step `step`.
PhaseTransitionProbe phase_transition_probe(Complex chi_inv, BackAction k, double hbar,
                                            double step, bool allow_sigma = true);

}  // namespace qnl
