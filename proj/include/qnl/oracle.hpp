#pragma once

// Brute-force reference minimizer of the sum noise over all physical meter
// triads at fixed (chi^-1, K, S_FF). It only uses the sum-noise PSD and the
// uncertainty slack as black boxes, never the closed-form optimum.

#include <complex>
#include <cstdint>

#include "qnl/meter.hpp"

namespace qnl {

enum class OracleMode {
  /// 3-D scan of (S_xx, Re S_xF, Im S_xF); the surface is reached by a
  /// monotone root search on the slack.
  Full3D,
  /// S_xx eliminated analytically from the saturated relation, both sign
  /// branches of sigma solved explicitly.
  EqualitySurface,
};

struct OracleConfig {
  int coarse_grid_points = 40;
  /// Bracket re-centering / widening rounds after the coarse scan.
  int refine_iterations = 6;
  double rel_tolerance = 1e-4;
  /// Half-width of the cross-PSD box in units of
  /// S_FF (1 + |Im K|/|chi_K^-1|) / |chi_K^-1| + hbar.
  double xf_box_scale = 10.0;
  /// Headroom of the S_xx axis over the largest saturating S_xx in the box.
  double s_xx_box_scale = 2.0;
  OracleMode mode = OracleMode::Full3D;
  bool parallel_scan = true;

  void validate() const;
};

struct OracleResult {
  double s_sum_min = 0.0;
  NoiseTriad argmin_triad;
  int iterations = 0;
  double feasible_fraction = 0.0;
};

/// The minimization problem at one frequency.
struct OracleProblem {
  Complex chi_inv;
  BackAction k;
  double s_ff = 0.0;
  double hbar = 1.0;
};

struct SearchBox {
  double xf_half_width = 0.0;
  double s_xx_max = 0.0;
};

struct CoarseScan {
  double best_value = 0.0;
  NoiseTriad best_triad;
  std::int64_t best_index = -1;
  std::int64_t feasible = 0;
  std::int64_t total = 0;
};

SearchBox oracle_search_box(const OracleProblem& p, const OracleConfig& cfg);

/// Exhaustive scan of an n^3 grid over the box. Both variants return
/// identical results; ties go to the lowest flat index.
CoarseScan coarse_scan_serial(const OracleProblem& p, const SearchBox& box, int n);
CoarseScan coarse_scan_parallel(const OracleProblem& p, const SearchBox& box, int n);

/// Smallest feasible S_xx at fixed S_xF, +inf if none exists.
double min_feasible_s_xx(const OracleProblem& p, Complex s_xf, OracleMode mode);

OracleResult brute_force_min(Complex chi_inv, BackAction k, double s_ff, const OracleConfig& cfg,
                             double hbar);

/// Random triad on the saturation surface, deterministic in `seed`.
NoiseTriad random_saturating_triad(BackAction k, double s_ff, std::uint64_t seed, double hbar);

}  // namespace qnl
