#include "qnl/config.hpp"

#include <cmath>
#include <fstream>
#include "json.hpp"
#include <sstream>
#include <string>

#include "qnl/errors.hpp"

namespace qnl {

using nlohmann::json;

namespace {

std::pair<std::size_t, std::size_t> line_column(const std::string& text, std::size_t byte) {
  std::size_t line = 1;
  std::size_t col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

// Cursor into the document that remembers its dotted path for diagnostics.
class Node {
 public:
  Node(const json& j, std::string path, const std::string& source)
      : j_(j), path_(std::move(path)), source_(source) {}

  [[noreturn]] void fail(const std::string& what) const {
    throw ConfigError(source_ + ": field '" + path_ + "': " + what);
  }

  bool has(const char* key) const { return j_.is_object() && j_.contains(key); }

  Node child(const char* key) const {
    if (!j_.is_object()) fail("expected an object");
    if (!j_.contains(key)) {
      throw ConfigError(source_ + ": field '" + join(key) + "': missing");
    }
    return Node(j_.at(key), join(key), source_);
  }

  Node index(std::size_t i) const {
    return Node(j_.at(i), path_ + "[" + std::to_string(i) + "]", source_);
  }

  double number() const {
    if (!j_.is_number()) fail("expected a number");
    const double v = j_.get<double>();
    if (!std::isfinite(v)) fail("must be finite");
    return v;
  }
  double positive() const {
    const double v = number();
    if (!(v > 0.0)) fail("must be > 0");
    return v;
  }
  int integer() const {
    if (!j_.is_number_integer()) fail("expected an integer");
    return j_.get<int>();
  }
  bool boolean() const {
    if (!j_.is_boolean()) fail("expected true or false");
    return j_.get<bool>();
  }
  std::string string() const {
    if (!j_.is_string()) fail("expected a string");
    return j_.get<std::string>();
  }
  std::vector<double> numbers() const {
    if (!j_.is_array()) fail("expected an array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < j_.size(); ++i) out.push_back(index(i).number());
    return out;
  }

  double number_or(const char* key, double dflt) const { return has(key) ? child(key).number() : dflt; }
  bool boolean_or(const char* key, bool dflt) const { return has(key) ? child(key).boolean() : dflt; }
  const std::string& path() const { return path_; }

 private:
  std::string join(const char* key) const { return path_.empty() ? key : path_ + "." + key; }

  const json& j_;
  std::string path_;
  const std::string& source_;
};

template <typename F>
auto guarded(const Node& n, F&& f) {
  try {
    return f();
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    n.fail(e.what());
  }
}

LinearTable<Complex> complex_table(const Node& n) {
  const auto omega = n.child("omega").numbers();
  const auto re = n.child("re").numbers();
  const auto im = n.child("im").numbers();
  if (re.size() != omega.size() || im.size() != omega.size()) {
    n.fail("omega, re and im must have equal length");
  }
  std::vector<Complex> v(omega.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = {re[i], im[i]};
  return guarded(n, [&] { return LinearTable<Complex>(omega, v); });
}

Susceptibility parse_probe(const Node& n) {
  const Node model_node = n.child("model");
  const std::string model = model_node.string();
  if (model == "oscillator") {
    DampedOscillator m{n.child("mass").positive(), n.child("omega0").number(),
                       n.number_or("gamma", 0.0)};
    return guarded(n, [&] { return Susceptibility(m); });
  }
  if (model == "free_mass") {
    FreeMass m{n.child("mass").positive(), n.number_or("gamma", 0.0)};
    return guarded(n, [&] { return Susceptibility(m); });
  }
  if (model == "table") {
    return guarded(n, [&] { return Susceptibility(complex_table(n.child("inverse"))); });
  }
  model_node.fail("unknown probe model '" + model + "' (oscillator, free_mass, table)");
}

BackActionModel parse_back_action(const Node& n) {
  if (n.has("table")) return BackActionModel(complex_table(n.child("table")));
  return BackActionModel(Complex{n.number_or("re", 0.0), n.number_or("im", 0.0)});
}

ThermalModel parse_thermal(const Node& n) {
  const Node model_node = n.child("model");
  const std::string model = model_node.string();
  if (model == "zero") return ThermalModel{};
  if (model == "uniform") {
    const double t = n.child("temperature").number();
    return guarded(n, [&] { return ThermalModel(UniformTemperature{t}); });
  }
  if (model == "table") {
    const auto omega = n.child("omega").numbers();
    const auto temp = n.child("temperature").numbers();
    return guarded(n, [&] { return ThermalModel(EffectiveTemperature(omega, temp)); });
  }
  model_node.fail("unknown thermal model '" + model + "' (zero, uniform, table)");
}

SweepRange parse_range(const Node& n) {
  SweepRange r;
  r.start = n.child("start").positive();
  r.stop = n.child("stop").positive();
  r.points = n.child("points").integer();
  if (!(r.start < r.stop)) n.fail("start must be < stop");
  if (r.points < 2) n.child("points").fail("must be >= 2");
  if (n.has("spacing")) {
    const Node s = n.child("spacing");
    const std::string v = s.string();
    if (v == "linear") {
      r.spacing = Spacing::Linear;
    } else if (v == "log") {
      r.spacing = Spacing::Log;
    } else {
      s.fail("expected 'linear' or 'log'");
    }
  }
  return r;
}

}  // namespace

const char* to_string(SweepMode m) {
  switch (m) {
    case SweepMode::FixedSFF: return "fixed_SFF";
    case SweepMode::FixedEffective: return "fixed_effective";
    case SweepMode::SweepSFFAtFixedOmega: return "sweep_SFF_at_fixed_omega";
  }
  return "?";
}

const char* to_string(OutputFormat f) { return f == OutputFormat::Csv ? "csv" : "json"; }

std::vector<double> SweepRange::nodes() const {
  std::vector<double> out(static_cast<std::size_t>(points));
  const double n1 = static_cast<double>(points - 1);
  for (int i = 0; i < points; ++i) {
    const double t = static_cast<double>(i) / n1;
    out[static_cast<std::size_t>(i)] =
        spacing == Spacing::Linear ? start + (stop - start) * t : start * std::pow(stop / start, t);
  }
  out.front() = start;
  out.back() = stop;
  return out;
}

BackAction BackActionModel::at(double omega) const {
  if (const auto* k = std::get_if<Complex>(&model_)) return BackAction{*k};
  return BackAction{std::get<LinearTable<Complex>>(model_).at(omega)};
}

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

SweepConfig parse_config(const std::string& text, const std::string& source) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    const auto [line, col] = line_column(text, e.byte > 0 ? e.byte - 1 : 0);
    throw ConfigError(source + ": line " + std::to_string(line) + ", column " +
                      std::to_string(col) + ": " + e.what());
  }
  const Node root(doc, "", source);
  if (!doc.is_object()) root.fail("top level must be an object");

  SweepConfig cfg;
  if (root.has("constants")) {
    const Node c = root.child("constants");
    cfg.consts.hbar = c.has("hbar") ? c.child("hbar").positive() : 1.0;
    cfg.consts.k_B = c.has("k_B") ? c.child("k_B").positive() : 1.0;
  }
  cfg.probe = parse_probe(root.child("probe"));
  if (root.has("back_action")) cfg.back_action = parse_back_action(root.child("back_action"));
  if (root.has("thermal")) cfg.thermal = parse_thermal(root.child("thermal"));

  const Node mode_node = root.child("mode");
  const std::string mode = mode_node.string();
  if (mode == "fixed_SFF") {
    cfg.mode = SweepMode::FixedSFF;
  } else if (mode == "fixed_effective") {
    cfg.mode = SweepMode::FixedEffective;
  } else if (mode == "sweep_SFF_at_fixed_omega") {
    cfg.mode = SweepMode::SweepSFFAtFixedOmega;
  } else {
    mode_node.fail("expected fixed_SFF, fixed_effective or sweep_SFF_at_fixed_omega");
  }

  if (cfg.mode == SweepMode::SweepSFFAtFixedOmega) {
    cfg.s_ff_range = parse_range(root.child("s_ff_range"));
    cfg.omega = root.child("omega").positive();
  } else {
    cfg.grid = parse_range(root.child("grid"));
    cfg.s_ff = root.child("s_ff").positive();
  }
  if (root.has("omega") && cfg.mode != SweepMode::SweepSFFAtFixedOmega) {
    cfg.omega = root.child("omega").positive();
  }
  cfg.effective_kernel = root.number_or("effective_kernel", 0.0);

  if (root.has("flags")) {
    const Node f = root.child("flags");
    cfg.allow_sigma = f.boolean_or("allow_sigma", true);
    cfg.sigma_zero = f.boolean_or("sigma_zero", false);
    if (f.has("allow_sigma") && f.has("sigma_zero") && cfg.allow_sigma && cfg.sigma_zero) {
      f.fail("allow_sigma and sigma_zero are mutually exclusive");
    }
  }
  if (root.has("output")) {
    const Node o = root.child("output");
    if (o.has("format")) {
      const Node fmt = o.child("format");
      const std::string v = fmt.string();
      if (v == "csv") {
        cfg.format = OutputFormat::Csv;
      } else if (v == "json") {
        cfg.format = OutputFormat::Json;
      } else {
        fmt.fail("expected 'csv' or 'json'");
      }
    }
    if (o.has("path")) cfg.output_path = o.child("path").string();
  }
  if (root.has("verify")) {
    const Node v = root.child("verify");
    if (v.has("oracle_points")) {
      cfg.verify_oracle_points = v.child("oracle_points").integer();
      if (cfg.verify_oracle_points < 0) v.child("oracle_points").fail("must be >= 0");
    }
  }
  if (root.has("spin_figure")) {
    const Node s = root.child("spin_figure");
    if (s.has("points")) {
      const Node p = s.child("points");
      cfg.figure_points = p.integer();
      if (cfg.figure_points < 3 || cfg.figure_points % 2 == 0) p.fail("must be odd and >= 3");
    }
  }

  json hashed = doc;
  hashed.erase("output");
  cfg.hash = fnv1a64(hashed.dump());
  return cfg;
}

SweepConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path.string() + ": cannot open");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path.string());
}

}  // namespace qnl
