#include "qnl/table_io.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>
#include <string_view>

#include "json.hpp"
#include "qnl/errors.hpp"

namespace qnl {

namespace {

using ojson = nlohmann::ordered_json;

constexpr std::array<const char*, 13> kColumns = {
    "omega",      "sql",       "dql",         "s_thr",       "s_sum_opt",
    "regime",     "s_fdt",     "s_total",     "sigma_opt",   "s_xx_opt",
    "re_s_xf_opt", "im_s_xf_opt", "s_ff"};

constexpr const char* kInfNote = "s_thr=inf marks a lossless probe (infinite threshold)";
constexpr const char* kJsonInfNote = "null s_thr marks a lossless probe (infinite threshold)";

std::vector<std::string> split(std::string_view s, std::string_view sep) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (true) {
    const std::size_t next = s.find(sep, pos);
    if (next == std::string_view::npos) {
      out.emplace_back(s.substr(pos));
      return out;
    }
    out.emplace_back(s.substr(pos, next - pos));
    pos = next + sep.size();
  }
}

Regime parse_regime(const std::string& s) {
  if (s == "qcrb") return Regime::QcrbLimited;
  if (s == "dql") return Regime::DqlLimited;
  throw ConfigError("unknown regime tag '" + s + "'");
}

SweepMode parse_mode(const std::string& s) {
  for (auto m : {SweepMode::FixedSFF, SweepMode::FixedEffective, SweepMode::SweepSFFAtFixedOmega}) {
    if (s == to_string(m)) return m;
  }
  throw ConfigError("unknown sweep mode '" + s + "'");
}

std::uint64_t parse_hash(const std::string& s) {
  std::uint64_t h = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), h, 16);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
    throw ConfigError("malformed config hash '" + s + "'");
  }
  return h;
}

std::string join_numbers(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ';';
    out += format_number(v[i]);
  }
  return out;
}

ojson json_number(double v) { return std::isfinite(v) ? ojson(v) : ojson(nullptr); }

double from_json_number(const ojson& j) {
  if (j.is_null()) return std::numeric_limits<double>::infinity();
  if (!j.is_number()) throw ConfigError("expected a number in table");
  return j.get<double>();
}

}  // namespace

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (v == 0.0) return "0";
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

double parse_number(const std::string& s) {
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
    throw ConfigError("malformed number '" + s + "'");
  }
  return v;
}

std::string hash_hex(std::uint64_t h) {
  std::array<char, 17> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), h, 16);
  std::string s(buf.data(), res.ptr);
  return std::string(16 - s.size(), '0') + s;
}

std::string to_csv(const BudgetTable& t) {
  std::ostringstream os;
  os << "# qnl " << t.tool_version << " | config_hash=" << hash_hex(t.config_hash)
     << " | mode=" << to_string(t.mode) << " | transitions=" << join_numbers(t.transitions)
     << " | " << kInfNote << '\n';
  for (std::size_t i = 0; i < kColumns.size(); ++i) os << (i ? "," : "") << kColumns[i];
  os << '\n';
  for (const auto& r : t.rows) {
    const auto& p = r.point;
    os << format_number(p.omega) << ',' << format_number(p.sql) << ',' << format_number(p.dql)
       << ',' << format_number(p.s_thr) << ',' << format_number(p.s_sum_opt) << ','
       << to_string(r.regime) << ',' << format_number(p.s_fdt) << ','
       << format_number(p.s_total) << ',' << format_number(r.sigma_opt) << ','
       << format_number(r.triad.s_xx) << ',' << format_number(r.triad.s_xf.real()) << ','
       << format_number(r.triad.s_xf.imag()) << ',' << format_number(r.s_ff) << '\n';
  }
  return os.str();
}

BudgetTable parse_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  BudgetTable t;
  if (!std::getline(in, line) || line.rfind("# qnl ", 0) != 0) {
    throw ConfigError("csv table: missing '# qnl' header line");
  }
  const auto fields = split(line.substr(6), " | ");
  if (fields.size() != 5) throw ConfigError("csv table: malformed header line");
  t.tool_version = fields[0];
  auto value_of = [&](const std::string& f, const std::string& key) {
    if (f.rfind(key + "=", 0) != 0) throw ConfigError("csv table: expected '" + key + "='");
    return f.substr(key.size() + 1);
  };
  t.config_hash = parse_hash(value_of(fields[1], "config_hash"));
  t.mode = parse_mode(value_of(fields[2], "mode"));
  const std::string tr = value_of(fields[3], "transitions");
  if (!tr.empty()) {
    for (const auto& v : split(tr, ";")) t.transitions.push_back(parse_number(v));
  }

  if (!std::getline(in, line)) throw ConfigError("csv table: missing column header");
  const auto cols = split(line, ",");
  if (cols.size() != kColumns.size()) throw ConfigError("csv table: unexpected column count");
  for (std::size_t i = 0; i < cols.size(); ++i) {
    if (cols[i] != kColumns[i]) throw ConfigError("csv table: unexpected column '" + cols[i] + "'");
  }

  std::size_t lineno = 2;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto c = split(line, ",");
    if (c.size() != kColumns.size()) {
      throw ConfigError("csv table line " + std::to_string(lineno) + ": wrong field count");
    }
    BudgetRow r;
    r.point.omega = parse_number(c[0]);
    r.point.sql = parse_number(c[1]);
    r.point.dql = parse_number(c[2]);
    r.point.s_thr = parse_number(c[3]);
    r.point.s_sum_opt = parse_number(c[4]);
    r.regime = parse_regime(c[5]);
    r.point.s_fdt = parse_number(c[6]);
    r.point.s_total = parse_number(c[7]);
    r.sigma_opt = parse_number(c[8]);
    r.triad.s_xx = parse_number(c[9]);
    r.triad.s_xf = {parse_number(c[10]), parse_number(c[11])};
    r.s_ff = parse_number(c[12]);
    r.triad.s_ff = r.s_ff;
    t.rows.push_back(r);
  }
  return t;
}

std::string to_json(const BudgetTable& t) {
  ojson j;
  j["tool"] = "qnl";
  j["version"] = t.tool_version;
  j["config_hash"] = hash_hex(t.config_hash);
  j["mode"] = to_string(t.mode);
  j["transitions"] = ojson::array();
  for (double v : t.transitions) j["transitions"].push_back(json_number(v));
  j["note"] = kJsonInfNote;
  j["columns"] = kColumns;
  ojson rows = ojson::array();
  for (const auto& r : t.rows) {
    ojson o;
    o["omega"] = json_number(r.point.omega);
    o["sql"] = json_number(r.point.sql);
    o["dql"] = json_number(r.point.dql);
    o["s_thr"] = json_number(r.point.s_thr);
    o["s_sum_opt"] = json_number(r.point.s_sum_opt);
    o["regime"] = to_string(r.regime);
    o["s_fdt"] = json_number(r.point.s_fdt);
    o["s_total"] = json_number(r.point.s_total);
    o["sigma_opt"] = json_number(r.sigma_opt);
    o["s_xx_opt"] = json_number(r.triad.s_xx);
    o["re_s_xf_opt"] = json_number(r.triad.s_xf.real());
    o["im_s_xf_opt"] = json_number(r.triad.s_xf.imag());
    o["s_ff"] = json_number(r.s_ff);
    rows.push_back(std::move(o));
  }
  j["rows"] = std::move(rows);
  return j.dump(2) + "\n";
}

BudgetTable parse_json(const std::string& text) {
  ojson j;
  try {
    j = ojson::parse(text);
  } catch (const ojson::exception& e) {
    throw ConfigError(std::string("json table: ") + e.what());
  }
  try {
    BudgetTable t;
    t.tool_version = j.at("version").get<std::string>();
    t.config_hash = parse_hash(j.at("config_hash").get<std::string>());
    t.mode = parse_mode(j.at("mode").get<std::string>());
    for (const auto& v : j.at("transitions")) t.transitions.push_back(from_json_number(v));
    for (const auto& o : j.at("rows")) {
      BudgetRow r;
      r.point.omega = from_json_number(o.at("omega"));
      r.point.sql = from_json_number(o.at("sql"));
      r.point.dql = from_json_number(o.at("dql"));
      r.point.s_thr = from_json_number(o.at("s_thr"));
      r.point.s_sum_opt = from_json_number(o.at("s_sum_opt"));
      r.regime = parse_regime(o.at("regime").get<std::string>());
      r.point.s_fdt = from_json_number(o.at("s_fdt"));
      r.point.s_total = from_json_number(o.at("s_total"));
      r.sigma_opt = from_json_number(o.at("sigma_opt"));
      r.triad.s_xx = from_json_number(o.at("s_xx_opt"));
      r.triad.s_xf = {from_json_number(o.at("re_s_xf_opt")), from_json_number(o.at("im_s_xf_opt"))};
      r.s_ff = from_json_number(o.at("s_ff"));
      r.triad.s_ff = r.s_ff;
      t.rows.push_back(r);
    }
    return t;
  } catch (const ojson::exception& e) {
    throw ConfigError(std::string("json table: ") + e.what());
  }
}

std::string serialize(const BudgetTable& table, OutputFormat format) {
  return format == OutputFormat::Csv ? to_csv(table) : to_json(table);
}

BudgetTable parse_table(const std::string& text) {
  const auto pos = text.find_first_not_of(" \t\r\n");
  if (pos != std::string::npos && text[pos] == '{') return parse_json(text);
  return parse_csv(text);
}

std::string to_csv(const SpinFigure& fig) {
  std::ostringstream os;
  os << "# qnl spin-figure | omega=" << format_number(fig.omega)
     << " | s_thr0=" << format_number(fig.s_thr0) << " | dql=" << format_number(fig.dql) << '\n';
  os << "s_ff,full,sigma_zero,spin_matched\n";
  for (const auto& r : fig.rows) {
    os << format_number(r.s_ff) << ',' << format_number(r.full) << ','
       << format_number(r.sigma_zero) << ',' << format_number(r.spin_matched) << '\n';
  }
  return os.str();
}

std::string to_json(const SpinFigure& fig) {
  ojson j;
  j["omega"] = fig.omega;
  j["s_thr0"] = fig.s_thr0;
  j["dql"] = fig.dql;
  ojson s_ff = ojson::array(), full = ojson::array(), zero = ojson::array(),
        matched = ojson::array();
  for (const auto& r : fig.rows) {
    s_ff.push_back(r.s_ff);
    full.push_back(r.full);
    zero.push_back(r.sigma_zero);
    matched.push_back(r.spin_matched);
  }
  j["s_ff"] = std::move(s_ff);
  j["full"] = std::move(full);
  j["sigma_zero"] = std::move(zero);
  j["spin_matched"] = std::move(matched);
  return j.dump(2) + "\n";
}

std::string serialize(const SpinFigure& fig, OutputFormat format) {
  return format == OutputFormat::Csv ? to_csv(fig) : to_json(fig);
}

}  // namespace qnl
