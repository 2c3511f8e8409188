#pragma once

// Frequency (or S_FF) sweeps through the optimizers, figure data for the
// spin-meter comparison, and the invariant verification suite.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qnl/config.hpp"
#include "qnl/optimizer.hpp"

namespace qnl {

inline constexpr const char* kToolVersion = "0.1.0";

struct BudgetRow {
  BudgetPoint point;
  Regime regime = Regime::QcrbLimited;
  double sigma_opt = 0.0;
  NoiseTriad triad;
  /// Back-action PSD used at this row (the swept variable in S_FF sweeps).
  double s_ff = 0.0;

  friend bool operator==(const BudgetRow&, const BudgetRow&) = default;
};

struct BudgetTable {
  std::string tool_version = kToolVersion;
  std::uint64_t config_hash = 0;
  SweepMode mode = SweepMode::FixedSFF;
  /// Swept value at each row whose regime tag differs from the previous row.
  std::vector<double> transitions;
  std::vector<BudgetRow> rows;

  friend bool operator==(const BudgetTable&, const BudgetTable&) = default;
};

/// One row of the sweep; FdtViolation messages name the offending point.
BudgetRow budget_row(const SweepConfig& cfg, double omega, double s_ff);

/// jobs <= 0 leaves the OpenMP default. Rows are assembled in grid order and
/// the error of the lowest failing row is rethrown.
BudgetTable run_budget(const SweepConfig& cfg, int jobs = 0);
BudgetTable run_budget_serial(const SweepConfig& cfg);

struct SpinFigureRow {
  double s_ff = 0.0;
  double full = 0.0;
  double sigma_zero = 0.0;
  double spin_matched = 0.0;
};

struct SpinFigure {
  double omega = 0.0;
  double s_thr0 = 0.0;
  double dql = 0.0;
  std::vector<SpinFigureRow> rows;
};

/// Sum noise versus effective S_FF at cfg.omega on an odd log grid spanning
/// [0.01, 100] * threshold (threshold on the middle node): full optimum,
/// sigma-zero optimum, matched spin meter.
SpinFigure spin_figure(const SweepConfig& cfg);

struct CheckResult {
  std::string name;
  double measured = 0.0;
  double tolerance = 0.0;
  bool passed = false;
  std::string detail;
};

struct VerifyOptions {
  std::uint64_t seed = 1;
  int jobs = 0;
  std::optional<std::string> golden_path;
};

struct VerifyReport {
  std::vector<CheckResult> checks;
  bool passed() const;
};

VerifyReport verify(const SweepConfig& cfg, const VerifyOptions& opts);

}  // namespace qnl
