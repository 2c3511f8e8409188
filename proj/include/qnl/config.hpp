#pragma once

// Declarative sweep configuration (JSON document).

#include <cstdint>
#include <filesystem>
#include <string>
#include <variant>
#include <vector>

#include "qnl/meter.hpp"
#include "qnl/spectra.hpp"

namespace qnl {

enum class SweepMode { FixedSFF, FixedEffective, SweepSFFAtFixedOmega };
enum class Spacing { Linear, Log };
enum class OutputFormat { Csv, Json };

const char* to_string(SweepMode m);
const char* to_string(OutputFormat f);

struct SweepRange {
  double start = 0.0;
  double stop = 0.0;
  int points = 2;
  Spacing spacing = Spacing::Linear;

  /// Endpoints are reproduced exactly.
  std::vector<double> nodes() const;
};

/// Constant or tabulated K(Omega).
class BackActionModel {
 public:
  using Model = std::variant<Complex, LinearTable<Complex>>;
  BackActionModel() = default;
  explicit BackActionModel(Complex k) : model_(k) {}
  explicit BackActionModel(LinearTable<Complex> table) : model_(std::move(table)) {}
  BackAction at(double omega) const;
  const Model& model() const { return model_; }

 private:
  Model model_ = Complex{};
};

struct SweepConfig {
  Susceptibility probe{DampedOscillator{}};
  BackActionModel back_action;
  ThermalModel thermal;
  PhysConstants consts;
  SweepMode mode = SweepMode::FixedSFF;
  /// Frequency grid for the fixed_SFF and fixed_effective modes.
  SweepRange grid;
  /// S_FF (or effective S_FF) for the frequency sweeps.
  double s_ff = 0.0;
  /// Swept S_FF range and frequency for sweep_SFF_at_fixed_omega.
  SweepRange s_ff_range;
  double omega = 0.0;
  /// Real gauge kernel used by fixed_effective and spin-figure.
  double effective_kernel = 0.0;
  bool allow_sigma = true;
  bool sigma_zero = false;
  OutputFormat format = OutputFormat::Csv;
  std::string output_path;
  int verify_oracle_points = 5;
  int figure_points = 201;
  /// FNV-1a of the canonical JSON dump, output section excluded.
  std::uint64_t hash = 0;

  /// Sigma left free by the optimizers.
  bool sigma_free() const { return allow_sigma && !sigma_zero; }
};

/// Parses a JSON document. ConfigError messages carry "line L, column C"
/// for syntax errors and the dotted field path for semantic ones.
SweepConfig parse_config(const std::string& text, const std::string& source = "<config>");
SweepConfig load_config(const std::filesystem::path& path);

std::uint64_t fnv1a64(const std::string& bytes);

}  // namespace qnl
