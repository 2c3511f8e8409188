// qnl: quantum noise budget tool.
//
//   qnl budget <config>       noise budget table
//   qnl verify <config>       invariant suite, exit 2 on failure
//   qnl spin-figure <config>  full / sigma-zero / matched-spin series
//
// Exit codes: 0 success, 1 configuration error, 2 verification failure.
// QNL_LOG=trace|debug|info|warn|error|off sets log verbosity (default warn).

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "qnl/budget.hpp"
#include "qnl/config.hpp"
#include "qnl/errors.hpp"
#include "qnl/table_io.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitVerify = 2;

void setup_logging() {
  auto logger = spdlog::stderr_color_mt("qnl");
  spdlog::set_default_logger(logger);
  spdlog::set_level(spdlog::level::warn);
  if (const char* env = std::getenv("QNL_LOG")) {
    spdlog::set_level(spdlog::level::from_str(env));
  }
}

void emit(const std::string& text, const std::string& path) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw qnl::ConfigError(path + ": cannot write");
  out << text;
  spdlog::info("wrote {}", path);
}

}  // namespace

int main(int argc, char** argv) {
  setup_logging();

  CLI::App app{"Quantum noise limits of linear force sensors"};
  app.set_version_flag("--version", qnl::kToolVersion);
  app.require_subcommand(1);

  std::string config_path;
  std::string output;
  std::string format;
  std::uint64_t seed = 1;
  int jobs = 0;
  std::string golden;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("config", config_path, "sweep configuration (JSON)")->required();
    sub->add_option("--output", output, "output path (default: config output.path or stdout)");
    sub->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--jobs", jobs, "worker threads (0: OpenMP default)")->check(CLI::NonNegativeNumber);
  };

  auto* budget = app.add_subcommand("budget", "compute the noise budget table");
  add_common(budget);
  auto* verify = app.add_subcommand("verify", "run the invariant verification suite");
  add_common(verify);
  verify->add_option("--seed", seed, "oracle sampling seed");
  verify->add_option("--golden", golden, "reference table to diff against");
  auto* figure = app.add_subcommand("spin-figure", "emit the spin-meter comparison series");
  add_common(figure);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfig;
  }

  try {
    qnl::SweepConfig cfg = qnl::load_config(config_path);
    if (!format.empty()) cfg.format = format == "csv" ? qnl::OutputFormat::Csv : qnl::OutputFormat::Json;
    const std::string out_path = output.empty() ? cfg.output_path : output;
    spdlog::debug("config {} hash {}", config_path, qnl::hash_hex(cfg.hash));

    if (budget->parsed()) {
      const auto table = qnl::run_budget(cfg, jobs);
      spdlog::info("{} rows, {} regime transitions", table.rows.size(), table.transitions.size());
      emit(qnl::serialize(table, cfg.format), out_path);
      return kExitOk;
    }
    if (figure->parsed()) {
      emit(qnl::serialize(qnl::spin_figure(cfg), cfg.format), out_path);
      return kExitOk;
    }

    qnl::VerifyOptions opts;
    opts.seed = seed;
    opts.jobs = jobs;
    if (!golden.empty()) opts.golden_path = golden;
    const auto report = qnl::verify(cfg, opts);
    std::string text;
    for (const auto& c : report.checks) {
      text += std::string(c.passed ? "PASS " : "FAIL ") + c.name +
              " measured=" + qnl::format_number(c.measured) +
              " tol=" + qnl::format_number(c.tolerance);
      if (!c.detail.empty()) text += " (" + c.detail + ")";
      text += '\n';
    }
    text += report.passed() ? "verify: all checks passed\n" : "verify: FAILED\n";
    emit(text, out_path);
    return report.passed() ? kExitOk : kExitVerify;
  } catch (const qnl::Error& e) {
    spdlog::error("{}", e.what());
    return kExitConfig;
  }
}
