#include "qnl/oracle.hpp"

#include <omp.h>

#include <algorithm>
#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <string>

#include "qnl/errors.hpp"

namespace qnl {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_fdt(double s_ff, BackAction k, double hbar) {
  if (!(s_ff > 0.0) || !std::isfinite(s_ff)) throw DomainError("S_FF must be positive");
  if (s_ff < hbar * std::abs(k.k.imag())) {
    throw FdtViolation("S_FF below hbar|Im K| in oracle problem");
  }
}

// Root of the saturated relation, explicit on each branch of |sigma|.
double saturating_s_xx(BackAction k, double s_ff, Complex s_xf, double hbar) {
  const double im_k = k.k.imag();
  const double y2 = s_xf.real() * s_xf.real();
  const double z = s_xf.imag();
  const double vac = 0.25 * hbar * hbar;
  double best = kInf;
  // sigma >= 0
  const double den_plus = s_ff - hbar * im_k;
  if (den_plus > 0.0) {
    const double s = (y2 + z * z - hbar * z + vac) / den_plus;
    if (im_k * s - z >= 0.0) best = std::min(best, s);
  }
  // sigma <= 0
  const double den_minus = s_ff + hbar * im_k;
  if (den_minus > 0.0) {
    const double s = (y2 + z * z + hbar * z + vac) / den_minus;
    if (im_k * s - z <= 0.0) best = std::min(best, s);
  }
  return best;
}

double slack_at(const OracleProblem& p, double s_xx, Complex s_xf) {
  return uncertainty_slack(NoiseTriad{s_xx, s_xf, p.s_ff}, p.k, p.hbar);
}

double objective(const OracleProblem& p, double s_xx, Complex s_xf) {
  return sum_noise_psd(NoiseTriad{s_xx, s_xf, p.s_ff}, p.chi_inv, p.k);
}

double axis_value(double lo, double hi, int i, int n) {
  return lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
}

// S_xx axis is quadratically graded towards zero, excluding zero itself
// (the slack is always negative there).
double s_xx_axis(const SearchBox& box, int i, int n) {
  const double t = static_cast<double>(i + 1) / static_cast<double>(n);
  return box.s_xx_max * t * t;
}

struct GridPoint {
  double value;
  std::int64_t index;
  bool feasible;
};

GridPoint eval_grid_point(const OracleProblem& p, const SearchBox& box, int n, std::int64_t idx) {
  const auto nn = static_cast<std::int64_t>(n);
  const int ix = static_cast<int>(idx / (nn * nn));
  const int iy = static_cast<int>((idx / nn) % nn);
  const int iz = static_cast<int>(idx % nn);
  const double s_xx = s_xx_axis(box, ix, n);
  const Complex s_xf{axis_value(-box.xf_half_width, box.xf_half_width, iy, n),
                     axis_value(-box.xf_half_width, box.xf_half_width, iz, n)};
  if (slack_at(p, s_xx, s_xf) < 0.0) return {kInf, idx, false};
  return {objective(p, s_xx, s_xf), idx, true};
}

CoarseScan finish_scan(const OracleProblem& p, const SearchBox& box, int n, GridPoint best,
                       std::int64_t feasible) {
  CoarseScan out;
  const auto nn = static_cast<std::int64_t>(n);
  out.total = nn * nn * nn;
  out.feasible = feasible;
  out.best_index = best.feasible ? best.index : -1;
  out.best_value = best.value;
  if (best.feasible) {
    const int ix = static_cast<int>(best.index / (nn * nn));
    const int iy = static_cast<int>((best.index / nn) % nn);
    const int iz = static_cast<int>(best.index % nn);
    out.best_triad = {s_xx_axis(box, ix, n),
                      Complex{axis_value(-box.xf_half_width, box.xf_half_width, iy, n),
                              axis_value(-box.xf_half_width, box.xf_half_width, iz, n)},
                      p.s_ff};
  }
  return out;
}

bool better(const GridPoint& a, const GridPoint& b) {
  if (a.feasible != b.feasible) return a.feasible;
  if (a.value != b.value) return a.value < b.value;
  return a.index < b.index;
}

}  // namespace

void OracleConfig::validate() const {
  if (coarse_grid_points < 32) throw DomainError("oracle grid needs at least 32 points per axis");
  if (refine_iterations < 1) throw DomainError("oracle needs at least one refinement round");
  if (!(rel_tolerance > 0.0)) throw DomainError("oracle tolerance must be positive");
  if (!(xf_box_scale > 0.0) || !(s_xx_box_scale >= 1.0)) throw DomainError("bad oracle box scale");
}

SearchBox oracle_search_box(const OracleProblem& p, const OracleConfig& cfg) {
  const double dk = std::abs(p.chi_inv + p.k.k);
  const double im_k = std::abs(p.k.k.imag());
  const double xf_scale =
      dk > 0.0 ? p.s_ff * (1.0 + im_k / dk) / dk + p.hbar : p.s_ff + p.hbar;
  SearchBox box;
  box.xf_half_width = cfg.xf_box_scale * xf_scale;
  const double w = box.xf_half_width;
  const double den = std::max(p.s_ff - p.hbar * im_k, 1e-2 * p.s_ff);
  box.s_xx_max = cfg.s_xx_box_scale * (2.0 * w * w + p.hbar * w + 0.25 * p.hbar * p.hbar) / den;
  return box;
}

CoarseScan coarse_scan_serial(const OracleProblem& p, const SearchBox& box, int n) {
  const auto total = static_cast<std::int64_t>(n) * n * n;
  GridPoint best{kInf, -1, false};
  std::int64_t feasible = 0;
  for (std::int64_t idx = 0; idx < total; ++idx) {
    const GridPoint g = eval_grid_point(p, box, n, idx);
    feasible += g.feasible ? 1 : 0;
    if (better(g, best)) best = g;
  }
  return finish_scan(p, box, n, best, feasible);
}

CoarseScan coarse_scan_parallel(const OracleProblem& p, const SearchBox& box, int n) {
  const auto total = static_cast<std::int64_t>(n) * n * n;
  GridPoint best{kInf, -1, false};
  std::int64_t feasible = 0;
#pragma omp parallel
  {
    GridPoint local{kInf, -1, false};
    std::int64_t local_feasible = 0;
#pragma omp for schedule(static) nowait
    for (std::int64_t idx = 0; idx < total; ++idx) {
      const GridPoint g = eval_grid_point(p, box, n, idx);
      local_feasible += g.feasible ? 1 : 0;
      if (better(g, local)) local = g;
    }
#pragma omp critical(qnl_oracle_scan)
    {
      feasible += local_feasible;
      if (better(local, best)) best = local;
    }
  }
  return finish_scan(p, box, n, best, feasible);
}

double min_feasible_s_xx(const OracleProblem& p, Complex s_xf, OracleMode mode) {
  if (mode == OracleMode::EqualitySurface) {
    double s = saturating_s_xx(p.k, p.s_ff, s_xf, p.hbar);
    if (!std::isfinite(s)) return kInf;
    // The closed branch solution can land an ulp on the infeasible side.
    for (int i = 0; i < 8 && slack_at(p, s, s_xf) < 0.0; ++i) s = std::nextafter(s, kInf);
    return s;
  }

  // Slack is non-decreasing in S_xx whenever S_FF >= hbar|Im K|.
  auto f = [&](double s) { return slack_at(p, s, s_xf); };
  const double seed = (std::norm(s_xf) + p.hbar * std::abs(s_xf.imag()) + 0.25 * p.hbar * p.hbar) /
                      p.s_ff;
  double hi = std::max(seed, std::numeric_limits<double>::min());
  int grow = 0;
  while (f(hi) < 0.0) {
    hi *= 2.0;
    if (++grow > 1100 || !std::isfinite(hi)) return kInf;
  }
  if (f(0.0) >= 0.0) return 0.0;
  std::uintmax_t max_iter = 400;
  const auto bracket = boost::math::tools::toms748_solve(
      f, 0.0, hi, boost::math::tools::eps_tolerance<double>(52), max_iter);
  double s = f(bracket.first) >= 0.0 ? bracket.first : bracket.second;
  for (int i = 0; i < 8 && f(s) < 0.0; ++i) s = std::nextafter(s, kInf);
  return s;
}

OracleResult brute_force_min(Complex chi_inv, BackAction k, double s_ff, const OracleConfig& cfg,
                             double hbar) {
  cfg.validate();
  require_fdt(s_ff, k, hbar);
  const OracleProblem p{chi_inv, k, s_ff, hbar};
  const SearchBox box = oracle_search_box(p, cfg);
  const int n = cfg.coarse_grid_points;

  const CoarseScan scan =
      cfg.parallel_scan ? coarse_scan_parallel(p, box, n) : coarse_scan_serial(p, box, n);
  if (scan.best_index < 0) {
    throw EmptyFeasibleRegion("no feasible triad on the oracle grid");
  }

  int evaluations = 0;
  // Sum noise on the constraint surface as a function of S_xF.
  auto surface = [&](double re, double im) {
    ++evaluations;
    const Complex s_xf{re, im};
    const double s_xx = min_feasible_s_xx(p, s_xf, cfg.mode);
    if (!std::isfinite(s_xx)) return kInf;
    return objective(p, s_xx, s_xf);
  };

  const int bits = std::numeric_limits<double>::digits;
  const std::uintmax_t max_iter = 500;
  auto argmin_re = [&](double im, double lo, double hi) {
    std::uintmax_t it = max_iter;
    return boost::math::tools::brent_find_minima([&](double re) { return surface(re, im); }, lo,
                                                 hi, bits, it);
  };

  const double cell = 2.0 * box.xf_half_width / static_cast<double>(n - 1);
  double re_c = scan.best_triad.s_xf.real();
  double im_c = scan.best_triad.s_xf.imag();
  double half_re = 3.0 * cell;
  double half_im = 3.0 * cell;
  double best_value = kInf;
  Complex best_xf{re_c, im_c};

  for (int round = 0; round < cfg.refine_iterations; ++round) {
    const double re_lo = re_c - half_re;
    const double re_hi = re_c + half_re;
    std::uintmax_t it = max_iter;
    const auto outer = boost::math::tools::brent_find_minima(
        [&](double im) { return argmin_re(im, re_lo, re_hi).second; }, im_c - half_im,
        im_c + half_im, bits, it);
    const auto inner = argmin_re(outer.first, re_lo, re_hi);

    const double prev = best_value;
    if (inner.second <= best_value) {
      best_value = inner.second;
      best_xf = {inner.first, outer.first};
    }
    // Minimum pinned to a bracket edge: re-center and widen.
    const bool edge_re = std::abs(inner.first - re_c) > 0.9 * half_re;
    const bool edge_im = std::abs(outer.first - im_c) > 0.9 * half_im;
    re_c = best_xf.real();
    im_c = best_xf.imag();
    if (!edge_re && !edge_im &&
        std::abs(prev - best_value) <= cfg.rel_tolerance * 1e-3 * std::abs(best_value)) {
      break;
    }
    if (edge_re) half_re *= 4.0;
    if (edge_im) half_im *= 4.0;
    if (!edge_re && !edge_im) {
      half_re *= 0.5;
      half_im *= 0.5;
    }
  }

  OracleResult out;
  const double s_xx = min_feasible_s_xx(p, best_xf, cfg.mode);
  out.argmin_triad = {s_xx, best_xf, s_ff};
  out.s_sum_min = objective(p, s_xx, best_xf);
  out.iterations = evaluations;
  out.feasible_fraction = static_cast<double>(scan.feasible) / static_cast<double>(scan.total);
  return out;
}

NoiseTriad random_saturating_triad(BackAction k, double s_ff, std::uint64_t seed, double hbar) {
  require_fdt(s_ff, k, hbar);
  std::mt19937_64 gen(seed);
  const double radius = 2.0 * hbar;
  std::uniform_real_distribution<double> coord(-radius, radius);
  for (int attempt = 0; attempt < 1000; ++attempt) {
    const double re = coord(gen);
    const double im = coord(gen);
    if (re * re + im * im > radius * radius) continue;
    const Complex s_xf{re, im};
    const double s_xx = saturating_s_xx(k, s_ff, s_xf, hbar);
    if (std::isfinite(s_xx) && s_xx >= 0.0) return {s_xx, s_xf, s_ff};
  }
  throw SamplerError("no saturating triad found after 1000 draws");
}

}  // namespace qnl
