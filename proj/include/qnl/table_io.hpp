#pragma once

// CSV / JSON serialization of budget tables and figure data. Numbers use the
// shortest decimal that round-trips, so parse -> emit is byte-identical.

#include <string>

#include "qnl/budget.hpp"

namespace qnl {

/// Shortest round-trip decimal; "inf" / "-inf" / "nan" for non-finite values.
std::string format_number(double v);
/// Inverse of format_number. ConfigError on malformed input.
double parse_number(const std::string& s);

std::string to_csv(const BudgetTable& table);
std::string to_json(const BudgetTable& table);
BudgetTable parse_csv(const std::string& text);
BudgetTable parse_json(const std::string& text);
std::string serialize(const BudgetTable& table, OutputFormat format);
/// Detects the format from the first non-space character.
BudgetTable parse_table(const std::string& text);

std::string to_csv(const SpinFigure& fig);
std::string to_json(const SpinFigure& fig);
std::string serialize(const SpinFigure& fig, OutputFormat format);

std::string hash_hex(std::uint64_t h);

}  // namespace qnl
