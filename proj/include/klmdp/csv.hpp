#pragma once

// Dense CSV for matrices and vectors: one row per line, comma separated,
// plain decimal numbers. Blank lines are ignored. Numbers are written with
// 17 significant digits, so a write/parse round trip is exact.

#include <filesystem>
#include <string>
#include <string_view>

#include "klmdp/chains.hpp"

namespace klmdp {

/// Rectangular numeric table. Throws ParseError carrying the 1-based line.
Matrix parse_matrix_csv(std::string_view text);

/// Square table whose rows are probability vectors; row-sum failures are
/// reported against the offending line.
StochasticMatrix parse_stochastic_csv(std::string_view text);

/// A single row or a single column.
Vector parse_vector_csv(std::string_view text);

/// Nonnegative vector; negative entries are reported against their line.
CostFunction parse_cost_csv(std::string_view text);

std::string format_number(double value);
std::string format_matrix_csv(const Matrix& m);
/// One value per line.
std::string format_vector_csv(const Vector& v);

/// Whole-file helpers. Throw ParseError (line 0) when the file cannot be opened.
std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);

}  // namespace klmdp
