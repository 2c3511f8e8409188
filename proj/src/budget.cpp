#include "qnl/budget.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <exception>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

#include "qnl/errors.hpp"
#include "qnl/meter.hpp"
#include "qnl/oracle.hpp"
#include "qnl/spin_meter.hpp"
#include "qnl/table_io.hpp"

namespace qnl {

namespace {

std::vector<std::pair<double, double>> sweep_points(const SweepConfig& cfg) {
  std::vector<std::pair<double, double>> pts;
  if (cfg.mode == SweepMode::SweepSFFAtFixedOmega) {
    for (double s : cfg.s_ff_range.nodes()) pts.emplace_back(cfg.omega, s);
  } else {
    for (double w : cfg.grid.nodes()) pts.emplace_back(w, cfg.s_ff);
  }
  return pts;
}

double swept_value(const SweepConfig& cfg, const BudgetRow& r) {
  return cfg.mode == SweepMode::SweepSFFAtFixedOmega ? r.s_ff : r.point.omega;
}

// Back action the optimal triad is expressed against at one row.
BackAction row_back_action(const SweepConfig& cfg, double omega) {
  if (cfg.mode == SweepMode::FixedEffective) return BackAction{Complex{cfg.effective_kernel, 0.0}};
  return cfg.back_action.at(omega);
}

BudgetTable assemble(const SweepConfig& cfg, std::vector<BudgetRow> rows) {
  BudgetTable t;
  t.config_hash = cfg.hash;
  t.mode = cfg.mode;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i].regime != rows[i - 1].regime) t.transitions.push_back(swept_value(cfg, rows[i]));
  }
  t.rows = std::move(rows);
  return t;
}

double rel_diff(double a, double b, double scale) {
  return std::abs(a - b) / std::max(scale, std::numeric_limits<double>::min());
}

CheckResult make_check(std::string name, double measured, double tol, std::string detail = {}) {
  return {std::move(name), measured, tol, measured <= tol, std::move(detail)};
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path + ": cannot open");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

CheckResult golden_check(const BudgetTable& table, const std::string& path) {
  constexpr double tol = 1e-12;
  const BudgetTable golden = parse_table(read_file(path));
  if (golden.rows.size() != table.rows.size()) {
    return {"golden", 1.0, tol, false,
            "row count " + std::to_string(table.rows.size()) + " vs golden " +
                std::to_string(golden.rows.size())};
  }
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& a = table.rows[i];
    const auto& b = golden.rows[i];
    const double va[] = {a.point.omega, a.point.sql,   a.point.dql,        a.point.s_thr,
                         a.point.s_sum_opt, a.point.s_fdt, a.point.s_total, a.sigma_opt,
                         a.triad.s_xx, a.triad.s_xf.real(), a.triad.s_xf.imag(), a.s_ff};
    const double vb[] = {b.point.omega, b.point.sql,   b.point.dql,        b.point.s_thr,
                         b.point.s_sum_opt, b.point.s_fdt, b.point.s_total, b.sigma_opt,
                         b.triad.s_xx, b.triad.s_xf.real(), b.triad.s_xf.imag(), b.s_ff};
    double worst = a.regime == b.regime ? 0.0 : 1.0;
    for (std::size_t c = 0; c < std::size(va); ++c) {
      if (va[c] == vb[c]) continue;
      const double scale = std::max({std::abs(va[c]), std::abs(vb[c]), 1e-300});
      worst = std::max(worst, std::isfinite(va[c] - vb[c]) ? std::abs(va[c] - vb[c]) / scale : 1.0);
    }
    if (worst > tol) {
      return {"golden", worst, tol, false,
              "first differing row " + std::to_string(i) + " (omega=" +
                  format_number(a.point.omega) + ", s_ff=" + format_number(a.s_ff) + ")"};
    }
  }
  return make_check("golden", 0.0, tol, std::to_string(table.rows.size()) + " rows match");
}

}  // namespace

BudgetRow budget_row(const SweepConfig& cfg, double omega, double s_ff) {
  const double hbar = cfg.consts.hbar;
  const Complex chi_inv = cfg.probe.inverse(omega);
  BudgetRow row;
  row.s_ff = s_ff;
  row.point.omega = omega;
  row.point.sql = hbar * std::abs(chi_inv);
  row.point.dql = hbar * std::abs(chi_inv.imag());

  OptimumReport rep;
  try {
    if (cfg.mode == SweepMode::FixedEffective) {
      const auto g = GaugeKernel::real(cfg.effective_kernel);
      rep = cfg.sigma_free() ? optimize_fixed_eff_backaction(chi_inv, g, s_ff, hbar)
                             : optimize_fixed_eff_backaction_sigma_zero(chi_inv, g, s_ff, hbar);
    } else {
      rep = optimize_fixed_backaction(chi_inv, cfg.back_action.at(omega), s_ff, cfg.sigma_free(),
                                      hbar);
    }
  } catch (const FdtViolation& e) {
    throw FdtViolation("at omega=" + format_number(omega) + ": " + e.what());
  }
  row.regime = rep.regime;
  row.sigma_opt = rep.sigma_opt;
  row.triad = rep.optimal_triad;
  row.point.s_thr = rep.s_threshold;
  row.point.s_sum_opt = rep.s_sum;
  row.point.s_fdt = fdt_psd(chi_inv, cfg.thermal.temperature(omega), cfg.consts, omega);
  row.point.s_total = row.point.s_sum_opt + row.point.s_fdt;
  return row;
}

BudgetTable run_budget_serial(const SweepConfig& cfg) {
  std::vector<BudgetRow> rows;
  for (const auto& [w, s] : sweep_points(cfg)) rows.push_back(budget_row(cfg, w, s));
  return assemble(cfg, std::move(rows));
}

BudgetTable run_budget(const SweepConfig& cfg, int jobs) {
  const auto pts = sweep_points(cfg);
  const auto n = static_cast<std::int64_t>(pts.size());
  std::vector<BudgetRow> rows(pts.size());
  std::vector<std::exception_ptr> errors(pts.size());
  const int threads = jobs > 0 ? jobs : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic, 4) num_threads(threads)
  for (std::int64_t i = 0; i < n; ++i) {
    const auto idx = static_cast<std::size_t>(i);
    try {
      rows[idx] = budget_row(cfg, pts[idx].first, pts[idx].second);
    } catch (...) {
      errors[idx] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return assemble(cfg, std::move(rows));
}

SpinFigure spin_figure(const SweepConfig& cfg) {
  if (!(cfg.omega > 0.0)) throw ConfigError("spin-figure needs a positive 'omega'");
  const double hbar = cfg.consts.hbar;
  const Complex chi_inv = cfg.probe.inverse(cfg.omega);
  const auto g = GaugeKernel::real(cfg.effective_kernel);
  SpinFigure fig;
  fig.omega = cfg.omega;
  fig.s_thr0 = threshold_eff(chi_inv, g, hbar);
  fig.dql = hbar * std::abs(chi_inv.imag());

  const int n = cfg.figure_points;
  const int mid = n / 2;
  for (int i = 0; i < n; ++i) {
    const double t = -2.0 + 4.0 * static_cast<double>(i) / static_cast<double>(n - 1);
    const double s = i == mid ? fig.s_thr0 : fig.s_thr0 * std::pow(10.0, t);
    SpinFigureRow r;
    r.s_ff = s;
    r.full = optimize_fixed_eff_backaction(chi_inv, g, s, hbar).s_sum;
    r.sigma_zero = optimize_fixed_eff_backaction_sigma_zero(chi_inv, g, s, hbar).s_sum;
    r.spin_matched = matched_sum_noise(s / hbar, chi_inv + g.kappa_eff, cfg.omega, hbar);
    fig.rows.push_back(r);
  }
  return fig;
}

bool VerifyReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
}

VerifyReport verify(const SweepConfig& cfg, const VerifyOptions& opts) {
  VerifyReport rep;
  const double hbar = cfg.consts.hbar;

  BudgetTable table;
  try {
    table = run_budget(cfg, opts.jobs);
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    rep.checks.push_back({"sweep", 1.0, 0.0, false, e.what()});
    return rep;
  }
  rep.checks.push_back(make_check("sweep", 0.0, 0.0, std::to_string(table.rows.size()) + " rows"));

  {
    double worst = 0.0;
    for (const auto& r : table.rows) {
      const auto& p = r.point;
      worst = std::max(worst, rel_diff(p.s_total, p.s_sum_opt + p.s_fdt, p.s_total));
      worst = std::max(worst, std::max(0.0, p.dql - p.s_sum_opt) / std::max(p.dql, 1e-300));
    }
    rep.checks.push_back(make_check("row_consistency", worst, 1e-12));
  }

  {
    double worst = 0.0;
    for (const auto& r : table.rows) {
      const NoiseTriad& t = r.triad;
      const double scale = t.s_xx * t.s_ff + std::norm(t.s_xf) + 0.25 * hbar * hbar;
      const double slack = uncertainty_slack(t, row_back_action(cfg, r.point.omega), hbar);
      worst = std::max(worst, std::abs(slack) / scale);
    }
    rep.checks.push_back(make_check("triad_saturation", worst, 1e-10));
  }

  std::mt19937_64 gen(opts.seed);
  const std::size_t n_rows = table.rows.size();

  {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    double worst = 0.0;
    const std::size_t spots = std::min<std::size_t>(5, n_rows);
    for (std::size_t s = 0; s < spots; ++s) {
      const auto& r = table.rows[spots > 1 ? s * (n_rows - 1) / (spots - 1) : 0];
      const Complex chi_inv = cfg.probe.inverse(r.point.omega);
      const BackAction k = row_back_action(cfg, r.point.omega);
      const double mag = std::abs(chi_inv) + std::abs(k.k) + 1.0;
      const Complex kappa{mag * u(gen), mag * u(gen)};
      const GaugeResult gr = gauge_transform(r.triad, k, GaugeKernel::general(kappa));
      const BackAction kk{kappa};
      const NoiseTriad& t = r.triad;
      const double sum_scale = std::norm(chi_inv + k.k) * t.s_xx + 2.0 * std::abs(chi_inv + k.k) *
                               std::abs(t.s_xf) + t.s_ff;
      const double slack_scale = t.s_xx * t.s_ff + std::norm(t.s_xf) + 0.25 * hbar * hbar +
                                 std::norm(kappa - k.k) * t.s_xx * t.s_xx;
      const double sigma_scale = (std::abs(k.k) + std::abs(kappa)) * t.s_xx + std::abs(t.s_xf);
      worst = std::max(worst, rel_diff(sum_noise_psd(t, chi_inv, k),
                                       sum_noise_psd(gr.triad, chi_inv, kk), sum_scale));
      worst = std::max(worst, rel_diff(uncertainty_slack(t, k, hbar),
                                       uncertainty_slack(gr.triad, kk, hbar), slack_scale));
      worst = std::max(worst, rel_diff(sigma(t, k), sigma(gr.triad, kk), sigma_scale));
    }
    rep.checks.push_back(make_check("gauge_invariance", worst, 1e-12,
                                    std::to_string(spots) + " spot checks"));
  }

  if (!cfg.sigma_free()) {
    rep.checks.push_back(make_check("oracle_agreement", 0.0, 1e-3, "skipped: sigma constrained"));
  } else {
    std::vector<std::size_t> idx(n_rows);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::vector<std::size_t> pick;
    std::sample(idx.begin(), idx.end(), std::back_inserter(pick),
                static_cast<std::size_t>(cfg.verify_oracle_points), gen);
    OracleConfig ocfg;
    double worst = 0.0;
    std::string where;
    for (std::size_t i : pick) {
      const auto& r = table.rows[i];
      const Complex chi_inv = cfg.probe.inverse(r.point.omega);
      const auto res = brute_force_min(chi_inv, row_back_action(cfg, r.point.omega), r.s_ff, ocfg,
                                       hbar);
      const double d = rel_diff(res.s_sum_min, r.point.s_sum_opt, r.point.s_sum_opt);
      if (d >= worst) {
        worst = d;
        where = "worst at omega=" + format_number(r.point.omega);
      }
    }
    rep.checks.push_back(make_check("oracle_agreement", worst, 1e-3,
                                    std::to_string(pick.size()) + " points, " + where));
  }

  {
    double worst = 0.0;
    for (const auto& r : table.rows) {
      const Complex chi_inv = cfg.probe.inverse(r.point.omega);
      const auto c = commutator_check(chi_inv, row_back_action(cfg, r.point.omega), hbar);
      worst = std::max(worst, std::abs(c.residual) / std::max(1.0, std::abs(c.c_thermal)));
    }
    rep.checks.push_back(make_check("commutator_residual", worst, 1e-14));
  }

  {
    const auto lossy = std::find_if(table.rows.begin(), table.rows.end(),
                                    [](const BudgetRow& r) { return r.point.dql > 0.0; });
    if (lossy == table.rows.end()) {
      rep.checks.push_back(make_check("phase_transition", 0.0, 1e-6, "skipped: no lossy point"));
    } else {
      const Complex chi_inv = cfg.probe.inverse(lossy->point.omega);
      const BackAction k = row_back_action(cfg, lossy->point.omega);
      try {
        const double thr = threshold_full(chi_inv, k, hbar);
        const auto probe = phase_transition_probe(chi_inv, k, hbar, 1e-4 * thr, cfg.sigma_free());
        const double d1_scale = std::max(std::abs(probe.d1_below), 1.0);
        double measured = std::abs(probe.d1_jump) / d1_scale;
        if (cfg.sigma_free()) measured = std::max(measured, std::abs(probe.d2_above) * thr / d1_scale);
        rep.checks.push_back(make_check("phase_transition", measured, 1e-6,
                                        "omega=" + format_number(lossy->point.omega) +
                                            " d2_below=" + format_number(probe.d2_below)));
      } catch (const Error& e) {
        rep.checks.push_back(make_check("phase_transition", 0.0, 1e-6,
                                        std::string("skipped: ") + e.what()));
      }
    }
  }

  if (opts.golden_path) rep.checks.push_back(golden_check(table, *opts.golden_path));
  return rep;
}

}  // namespace qnl
