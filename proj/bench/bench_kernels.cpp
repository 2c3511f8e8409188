// Serial reference vs OpenMP kernels: oracle grid scan and budget sweep.
// Usage: bench_kernels [grid_points] [sweep_points] [repeats]

#include <omp.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <string>

#include "qnl/budget.hpp"
#include "qnl/config.hpp"
#include "qnl/oracle.hpp"

namespace {

template <typename F>
double best_seconds(int repeats, F&& f) {
  double best = 1e300;
  for (int r = 0; r < repeats; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    f();
    const auto t1 = std::chrono::steady_clock::now();
    best = std::min(best, std::chrono::duration<double>(t1 - t0).count());
  }
  return best;
}

void report(const char* name, double serial, double parallel, bool same) {
  std::printf("%-14s serial %9.4f s   parallel %9.4f s   speedup %5.2fx   %s\n", name, serial,
              parallel, serial / parallel, same ? "identical" : "MISMATCH");
}

}  // namespace

int main(int argc, char** argv) {
  const int grid = argc > 1 ? std::atoi(argv[1]) : 96;
  const int sweep = argc > 2 ? std::atoi(argv[2]) : 20000;
  const int repeats = argc > 3 ? std::atoi(argv[3]) : 3;
  std::printf("threads: %d\n", omp_get_max_threads());

  const qnl::OracleProblem p{{-3.0, -0.4}, qnl::BackAction{{0.5, 0.1}}, 0.7, 1.0};
  qnl::OracleConfig ocfg;
  const auto box = qnl::oracle_search_box(p, ocfg);
  qnl::CoarseScan s_ser, s_par;
  const double t_scan_ser = best_seconds(repeats, [&] { s_ser = qnl::coarse_scan_serial(p, box, grid); });
  const double t_scan_par = best_seconds(repeats, [&] { s_par = qnl::coarse_scan_parallel(p, box, grid); });
  const bool scan_same = s_ser.best_index == s_par.best_index && s_ser.feasible == s_par.feasible;
  report("oracle scan", t_scan_ser, t_scan_par, scan_same);

  const std::string cfg_text = R"({
    "probe": {"model": "oscillator", "mass": 1, "omega0": 1, "gamma": 0.2},
    "back_action": {"re": 0.05, "im": 0.02},
    "thermal": {"model": "uniform", "temperature": 2.0},
    "mode": "fixed_SFF", "s_ff": 0.1,
    "grid": {"start": 0.05, "stop": 20, "points": )" + std::to_string(sweep) +
                               R"(, "spacing": "log"}})";
  const auto cfg = qnl::parse_config(cfg_text, "bench");
  qnl::BudgetTable b_ser, b_par;
  const double t_sweep_ser = best_seconds(repeats, [&] { b_ser = qnl::run_budget_serial(cfg); });
  const double t_sweep_par = best_seconds(repeats, [&] { b_par = qnl::run_budget(cfg); });
  const bool sweep_same = b_ser == b_par;
  report("budget sweep", t_sweep_ser, t_sweep_par, sweep_same);
  return scan_same && sweep_same ? 0 : 1;
}
