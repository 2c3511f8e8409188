// Acceptance suite: one PASS/FAIL line per criterion.
//   acceptance                 run every criterion
//   acceptance --criterion N   run criterion N only (exit 1 if it fails)

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "qnl/errors.hpp"
#include "qnl/meter.hpp"
#include "qnl/optimizer.hpp"
#include "qnl/oracle.hpp"
#include "qnl/spectra.hpp"
#include "qnl/spin_meter.hpp"
#include "qnl/table_io.hpp"
#include "support.hpp"

using namespace qnl;
using qnl::test::Draw;
using qnl::test::rel;

namespace {

// Tolerances, one per quantity named by the criteria.
constexpr double kDqlFloorAbs = 1e-12;
constexpr double kDqlPlateauRel = 1e-10;
constexpr double kOracleRel = 1e-3;
constexpr double kOracleUndercutRel = 1e-3;
constexpr double kOracleSeconds = 0.3;
constexpr double kQcrbRel = 1e-12;
constexpr double kGaugeRel = 1e-12;
constexpr double kPhaseD2Below = 20.0;
constexpr double kPhaseD2BelowRel = 0.02;
constexpr double kPhaseD2AboveAbs = 1e-6;
constexpr double kPhaseD1Abs = 1e-6;
constexpr double kPhaseStepRel = 1e-4;
constexpr double kSpinSaturation = 1e-12;
constexpr double kSpinResponseRel = 1e-10;
constexpr double kCommutatorAbs = 1e-14;
constexpr double kFigureRel = 1e-10;

struct Outcome {
  bool passed = true;
  std::string summary;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      passed = false;
      summary += (summary.empty() ? "" : "; ") + std::string("violated: ") + what;
    }
  }
  void note(const std::string& what) { summary += (summary.empty() ? "" : "; ") + what; }
};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

struct Instance {
  Complex chi_inv;
  BackAction k;
  double s_ff;
};

// Lossy probe, K with either sign of Im K, S_FF spread across both regimes.
Instance lossy_instance(Draw& d) {
  Instance in;
  in.chi_inv = d.lossy_chi_inv();
  in.k = BackAction{{d.uniform(-2.0, 2.0), d.uniform(-1.0, 1.0)}};
  const double floor = std::abs(in.k.k.imag());
  const double thr = threshold_full(in.chi_inv, in.k, 1.0);
  in.s_ff = floor + (thr - floor) * d.log_uniform(0.05, 20.0);
  return in;
}

Outcome criterion_1() {
  Outcome out;
  Draw d(1001);
  double worst_floor = 0.0;
  double worst_plateau = 0.0;
  int above = 0;
  for (int i = 0; i < 200; ++i) {
    const Instance in = lossy_instance(d);
    const auto r = optimize_fixed_backaction(in.chi_inv, in.k, in.s_ff, true, 1.0);
    const double dql = std::abs(in.chi_inv.imag());
    worst_floor = std::max(worst_floor, dql - r.s_sum);
    if (in.s_ff >= r.s_threshold) {
      ++above;
      worst_plateau = std::max(worst_plateau, rel(r.s_sum, dql));
    }
  }
  out.require(worst_floor <= kDqlFloorAbs, "s_sum >= dql - 1e-12");
  out.require(worst_plateau <= kDqlPlateauRel, "s_sum = dql above threshold");
  out.require(above > 0 && above < 200, "both regimes sampled");
  out.note("200 instances, " + std::to_string(above) + " above threshold, max(dql - s_sum) = " +
           num(worst_floor) + ", plateau rel = " + num(worst_plateau));
  return out;
}

Outcome criterion_2() {
  Outcome out;
  Draw d(2002);
  const OracleConfig cfg;
  double worst = 0.0;
  double undercut = 0.0;
  double slowest = 0.0;
  int above = 0;
  for (int i = 0; i < 100; ++i) {
    const Instance in = lossy_instance(d);
    const auto closed = optimize_fixed_backaction(in.chi_inv, in.k, in.s_ff, true, 1.0);
    above += closed.regime == Regime::DqlLimited;
    const auto t0 = std::chrono::steady_clock::now();
    const auto o = brute_force_min(in.chi_inv, in.k, in.s_ff, cfg, 1.0);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    slowest = std::max(slowest, secs);
    worst = std::max(worst, rel(o.s_sum_min, closed.s_sum));
    undercut = std::max(undercut, (closed.s_sum - o.s_sum_min) / closed.s_sum);
  }
  out.require(worst <= kOracleRel, "oracle agreement within 1e-3");
  out.require(undercut <= kOracleUndercutRel, "oracle never undercuts by more than 1e-3");
  out.require(slowest <= kOracleSeconds, "runtime <= 0.3 s per instance");
  out.require(above > 0 && above < 100, "both regimes sampled");
  out.note("100 instances, " + std::to_string(above) + " DQL-limited, max rel = " + num(worst) +
           ", max undercut = " + num(undercut) + ", slowest = " + num(slowest) + " s");
  return out;
}

Outcome criterion_3() {
  Outcome out;
  Draw d(3003);
  double worst_simple = 0.0;
  double worst_double = 0.0;
  for (int i = 0; i < 200; ++i) {
    const Complex chi{d.uniform(-3.0, 3.0), 0.0};
    const double s = d.log_uniform(1e-2, 10.0);
    const double re_k = d.uniform(-2.0, 2.0);
    const BackAction real_k{{re_k, 0.0}};
    worst_simple = std::max(worst_simple,
                            rel(qcrb_lossless(chi, real_k, s, 1.0), qcrb_simple(chi, real_k, s, 1.0)));
    const BackAction edge{{re_k, (i % 2 ? 1.0 : -1.0) * s}};
    worst_double = std::max(worst_double, rel(qcrb_lossless(chi, edge, s, 1.0),
                                              2.0 * qcrb_simple(chi, edge, s, 1.0)));
  }
  out.require(worst_simple <= kQcrbRel, "qcrb_lossless = qcrb_simple at Im K = 0");
  out.require(worst_double <= kQcrbRel, "qcrb_lossless = 2 qcrb_simple at hbar|Im K| = S_FF");
  out.note("200 draws, rel err " + num(worst_simple) + " / " + num(worst_double));
  return out;
}

Outcome criterion_4() {
  Outcome out;
  Draw d(4004);
  double worst = 0.0;
  bool bitwise = true;
  for (int i = 0; i < 500; ++i) {
    const NoiseTriad t{d.log_uniform(1e-3, 10.0), d.complex(3.0), d.log_uniform(1e-3, 10.0)};
    const BackAction k{d.complex(3.0)};
    const Complex kappa = d.complex(3.0);
    const Complex chi_inv = d.complex(3.0);
    const auto g = gauge_transform(t, k, GaugeKernel::general(kappa));
    const BackAction kk{kappa};
    // Residuals relative to the magnitude of the terms being summed.
    const double a = std::abs(chi_inv + k.k);
    const double sum_scale = a * a * t.s_xx + 2.0 * a * std::abs(t.s_xf) + t.s_ff;
    const double slack_scale =
        t.s_xx * t.s_ff + std::norm(t.s_xf) + std::norm(kappa - k.k) * t.s_xx * t.s_xx + 0.25;
    const double sigma_scale = (std::abs(k.k) + std::abs(kappa)) * t.s_xx + std::abs(t.s_xf);
    worst = std::max(worst, std::abs(sum_noise_psd(t, chi_inv, k) - sum_noise_psd(g.triad, chi_inv, kk)) /
                                sum_scale);
    worst = std::max(worst, std::abs(uncertainty_slack(t, k, 1.0) - uncertainty_slack(g.triad, kk, 1.0)) /
                                slack_scale);
    worst = std::max(worst, std::abs(sigma(t, k) - sigma(g.triad, kk)) / sigma_scale);

    const Complex fb = d.complex(3.0);
    const auto via_feedback = gauge_transform(t, k, feedback_equivalent_gauge(k, fb));
    const auto direct = gauge_transform(t, k, GaugeKernel::general(k.k - fb));
    bitwise = bitwise && via_feedback.triad == direct.triad &&
              via_feedback.chi_k_shift == direct.chi_k_shift;
  }
  out.require(worst <= kGaugeRel, "sum noise, slack and sigma invariant to 1e-12");
  out.require(bitwise, "feedback kernel composes bit-identically");
  out.note("500 draws, max scaled residual = " + num(worst) +
           (bitwise ? ", feedback composition bit-identical" : ""));
  return out;
}

Outcome criterion_5() {
  Outcome out;
  const Complex chi{0.0, -0.2};
  const BackAction k{};
  const double thr = threshold_eff(chi, GaugeKernel::real(0.0), 1.0);
  const double h = kPhaseStepRel * thr;
  const auto p = phase_transition_probe(chi, k, 1.0, h, true);
  const auto z = phase_transition_probe(chi, k, 1.0, h, false);
  out.require(std::abs(p.d2_below - kPhaseD2Below) <= kPhaseD2BelowRel * kPhaseD2Below,
              "d2 below = 20 +- 2%");
  out.require(std::abs(p.d2_above) <= kPhaseD2AboveAbs, "d2 above = 0 +- 1e-6");
  out.require(std::abs(p.d1_jump) <= kPhaseD1Abs, "first derivative continuous");
  out.require(std::abs(z.d1_jump) <= kPhaseD1Abs, "sigma-zero first derivative continuous");
  out.require(std::abs(z.d2_below - z.d2_above) <= kPhaseD2BelowRel * std::abs(z.d2_below),
              "sigma-zero second derivative continuous");
  out.note("d2 = " + num(p.d2_below) + " | " + num(p.d2_above) + ", d1 jump = " + num(p.d1_jump) +
           ", sigma-zero d2 = " + num(z.d2_below) + " | " + num(z.d2_above));
  return out;
}

Outcome criterion_6() {
  Outcome out;
  Draw d(6006);
  double worst_sat = 0.0;
  for (int i = 0; i < 200; ++i) {
    const double h = d.log_uniform(0.1, 10.0);
    const SpinMeterParams p{d.log_uniform(1e-2, 1e2), d.log_uniform(1e-2, 1e2),
                            NegativeMassOscillator{d.log_uniform(0.1, 10.0), d.uniform(0.5, 2.0),
                                                   d.log_uniform(1e-3, 1.0)}};
    const double w = d.uniform(0.1, 3.0);
    const Complex chi_s = spin_response(p.chi_s_model, w);
    const NoiseTriad t = spin_triad(p, w, h);
    const double resid = t.s_xx * t.s_ff - std::norm(t.s_xf) -
                         h * h * p.theta_S * std::abs(chi_s.imag()) - 0.25 * h * h;
    worst_sat = std::max(worst_sat, std::abs(resid) / (t.s_xx * t.s_ff));
  }

  const Complex chi_inv{-0.4, -0.2};
  bool dominance = true;
  for (int i = 0; i < 100; ++i) {
    const double theta = std::pow(10.0, -3.0 + 6.0 * i / 99.0);
    const double opt = optimize_fixed_eff_backaction(chi_inv, GaugeKernel::real(0.0), theta, 1.0).s_sum;
    dominance = dominance && matched_sum_noise(theta, chi_inv, 1.0, 1.0) >= opt;
  }

  double worst_resp = 0.0;
  int branch1 = 0;
  int branch2 = 0;
  for (int i = 0; i < 200; ++i) {
    const Complex probe = d.lossy_chi_inv();
    const Complex chi = 1.0 / probe;
    const double theta = d.log_uniform(1e-2, 1e2);
    (theta * std::abs(chi.imag()) < 0.5 ? branch1 : branch2)++;
    const NoiseTriad t = spin_triad_from_product(theta, optimal_spin_response(theta, chi, 1.0, 1.0), 1.0);
    const double opt = optimize_fixed_eff_backaction(probe, GaugeKernel::real(0.0), theta, 1.0).s_sum;
    worst_resp = std::max(worst_resp, rel(sum_noise_psd(t, probe, BackAction{}), opt));
  }
  out.require(worst_sat <= kSpinSaturation, "saturation identity to 1e-12");
  out.require(dominance, "matched >= optimum on the theta_I sweep");
  out.require(worst_resp <= kSpinResponseRel, "optimal spin response reproduces the optimum");
  out.require(branch1 > 0 && branch2 > 0, "both response branches exercised");
  out.note("saturation " + num(worst_sat) + ", response rel " + num(worst_resp) + " (" +
           std::to_string(branch1) + "/" + std::to_string(branch2) + " per branch)");
  return out;
}

Outcome criterion_7() {
  Outcome out;
  Draw d(7007);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const auto c = commutator_check(d.complex(3.0), BackAction{d.complex(3.0)}, 1.0);
    worst = std::max(worst, std::abs(c.residual));
  }
  out.require(worst <= kCommutatorAbs, "residual <= 1e-14");
  out.note("1000 draws, max |residual| = " + num(worst));
  return out;
}

struct FigureSeries {
  double s_thr0 = 0.0;
  double dql = 0.0;
  std::vector<double> s, full, zero, matched;
};

// Runs the CLI and parses its CSV output.
FigureSeries run_spin_figure() {
  const std::string out =
      (std::filesystem::temp_directory_path() / "qnl_acceptance_figure.csv").string();
  const std::string cmd = std::string(QNL_BINARY) + " spin-figure " + QNL_CONFIG_DIR +
                          "/spin_figure.json --format csv --output " + out;
  const int status = std::system(cmd.c_str());
  if (!WIFEXITED(status) || WEXITSTATUS(status) != 0) throw Error("spin-figure failed: " + cmd);
  std::ifstream in(out);
  std::string line;
  FigureSeries f;
  std::getline(in, line);
  for (const auto& field : {std::string("s_thr0="), std::string("dql=")}) {
    const auto pos = line.find(field) + field.size();
    const double v = parse_number(line.substr(pos, line.find(' ', pos) - pos));
    (field == "dql=" ? f.dql : f.s_thr0) = v;
  }
  std::getline(in, line);
  while (std::getline(in, line)) {
    std::stringstream ss(line);
    std::string c[4];
    for (auto& x : c) std::getline(ss, x, ',');
    f.s.push_back(parse_number(c[0]));
    f.full.push_back(parse_number(c[1]));
    f.zero.push_back(parse_number(c[2]));
    f.matched.push_back(parse_number(c[3]));
  }
  std::filesystem::remove(out);
  return f;
}

Outcome criterion_8() {
  Outcome out;
  const FigureSeries f = run_spin_figure();
  const std::size_t n = f.s.size();
  out.require(n >= 3 && rel(f.s.front(), 0.01 * f.s_thr0) <= kFigureRel &&
                  rel(f.s.back(), 100.0 * f.s_thr0) <= kFigureRel,
              "series span [0.01, 100] S_thr0");

  std::size_t first_bad = n;
  for (std::size_t i = 0; i < n && first_bad == n; ++i) {
    if (!(f.full[i] <= f.zero[i] && f.zero[i] <= f.matched[i])) first_bad = i;
  }
  if (first_bad < n) {
    out.require(false, "ordering full <= sigma-zero <= spin-matched, first broken at S/S_thr0 = " +
                           num(f.s[first_bad] / f.s_thr0) + " (sigma-zero " +
                           num(f.zero[first_bad]) + " > matched " + num(f.matched[first_bad]) + ")");
  }

  bool flat = true;
  for (std::size_t i = 0; i < n; ++i) {
    if (f.s[i] >= f.s_thr0) flat = flat && rel(f.full[i], f.dql) <= kFigureRel;
  }
  out.require(flat, "full series constant at DQL for S >= S_thr0");

  const auto imin = static_cast<std::size_t>(std::min_element(f.zero.begin(), f.zero.end()) - f.zero.begin());
  bool unique = f.s[imin] == f.s_thr0 && rel(f.zero[imin], f.dql) <= kFigureRel;
  for (std::size_t i = 0; i < n; ++i) {
    if (i != imin) unique = unique && f.zero[i] > f.zero[imin];
  }
  out.require(unique, "sigma-zero unique minimum DQL at S_thr0");

  // Distance to the DQL at the last point, relative to that at S_thr0 * 10.
  auto gap = [&](const std::vector<double>& v, std::size_t i) { return (v[i] - f.dql) / f.dql; };
  bool matched_converges = true;
  for (std::size_t i = 1; i < n; ++i) matched_converges = matched_converges && f.matched[i] < f.matched[i - 1];
  matched_converges = matched_converges && gap(f.matched, n - 1) < 1e-2;
  const bool full_converges = gap(f.full, n - 1) <= kFigureRel;
  const bool zero_diverges = gap(f.zero, n - 1) > 1.0 && f.zero[n - 1] > f.zero[n - 2];
  out.require(full_converges && matched_converges && zero_diverges,
              "only full and matched converge to DQL as S grows");
  out.note(std::to_string(n) + " points, S_thr0 = " + num(f.s_thr0) + ", DQL = " + num(f.dql) +
           ", end gaps full/zero/matched = " + num(gap(f.full, n - 1)) + "/" +
           num(gap(f.zero, n - 1)) + "/" + num(gap(f.matched, n - 1)));
  return out;
}

Outcome criterion_9() {
  Outcome out;
  Draw d(9009);
  const PhysConstants c;
  bool exact = true;
  bool monotone = true;
  for (int i = 0; i < 1000; ++i) {
    const Susceptibility model =
        i % 2 ? Susceptibility(DampedOscillator{d.log_uniform(0.1, 10.0), d.uniform(0.1, 5.0),
                                                d.log_uniform(1e-4, 1.0)})
              : Susceptibility(FreeMass{d.log_uniform(0.1, 10.0), d.log_uniform(1e-4, 1.0)});
    const double w = d.log_uniform(1e-2, 1e2);
    exact = exact && fdt_psd(model, ThermalModel{}, c, w) == dql(model, 1.0, w);
  }
  const Susceptibility osc(DampedOscillator{1.0, 1.0, 0.2});
  for (double w : {0.1, 1.0, 10.0}) {
    double prev = fdt_psd(osc, ThermalModel{}, c, w);
    double t = 0.01;
    for (int i = 0; i < 10; ++i, t *= 3.0) {
      const double v = fdt_psd(osc, ThermalModel(UniformTemperature{t}), c, w);
      monotone = monotone && v >= prev;
      prev = v;
    }
    monotone = monotone && prev > dql(osc, 1.0, w);
  }
  out.require(exact, "fdt_psd(T = 0) == dql exactly");
  out.require(monotone, "fdt_psd monotone on the temperature ladder");
  out.note("1000 model draws, 10-point ladder at 3 frequencies");
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance criteria"};
  int only = 0;
  app.add_option("--criterion", only, "run a single criterion (1-9)")->check(CLI::Range(1, 9));
  CLI11_PARSE(app, argc, argv);

  const std::map<int, std::pair<const char*, std::function<Outcome()>>> criteria = {
      {1, {"DQL floor and saturation", criterion_1}},
      {2, {"oracle equivalence", criterion_2}},
      {3, {"QCRB endpoints", criterion_3}},
      {4, {"gauge and feedback invariance", criterion_4}},
      {5, {"phase transition", criterion_5}},
      {6, {"spin-meter identities", criterion_6}},
      {7, {"commutator cancellation", criterion_7}},
      {8, {"spin-figure structure", criterion_8}},
      {9, {"FDT consistency", criterion_9}},
  };

  bool all = true;
  for (const auto& [id, entry] : criteria) {
    if (only != 0 && id != only) continue;
    Outcome o;
    try {
      o = entry.second();
    } catch (const std::exception& e) {
      o.passed = false;
      o.summary = std::string("exception: ") + e.what();
    }
    std::printf("criterion %d %s: %s: %s\n", id, o.passed ? "PASS" : "FAIL", entry.first,
                o.summary.c_str());
    all = all && o.passed;
  }
  return all ? 0 : 1;
}
