#include "klmdp/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <vector>

#include <fmt/format.h>

namespace klmdp {

namespace {

struct Row {
  std::size_t line = 0;
  std::vector<double> values;
};

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double parse_number(std::string_view cell, std::size_t line) {
  cell = trim(cell);
  if (!cell.empty() && cell.front() == '+') cell.remove_prefix(1);
  double value = 0.0;
  const auto* end = cell.data() + cell.size();
  const auto [ptr, ec] = std::from_chars(cell.data(), end, value);
  if (cell.empty() || ec != std::errc() || ptr != end) {
    throw ParseError("not a number: '" + std::string(cell) + "'", line);
  }
  if (!std::isfinite(value)) throw ParseError("value is not finite", line);
  return value;
}

std::vector<Row> parse_rows(std::string_view text) {
  std::vector<Row> rows;
  std::size_t line = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto end = text.find('\n', pos);
    const auto raw = text.substr(pos, end == std::string_view::npos ? std::string_view::npos : end - pos);
    pos = end == std::string_view::npos ? text.size() + 1 : end + 1;
    ++line;
    const auto content = trim(raw);
    if (content.empty()) continue;

    Row row;
    row.line = line;
    std::size_t start = 0;
    while (true) {
      const auto comma = content.find(',', start);
      row.values.push_back(parse_number(content.substr(start, comma - start), line));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (!rows.empty() && row.values.size() != rows.front().values.size()) {
      throw ParseError("expected " + std::to_string(rows.front().values.size()) + " columns, found " +
                           std::to_string(row.values.size()),
                       line);
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ParseError("no data", 0);
  return rows;
}

Matrix to_matrix(const std::vector<Row>& rows) {
  Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().values.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows[i].values.size(); ++j) {
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i].values[j];
    }
  }
  return m;
}

}  // namespace

Matrix parse_matrix_csv(std::string_view text) { return to_matrix(parse_rows(text)); }

StochasticMatrix parse_stochastic_csv(std::string_view text) {
  const auto rows = parse_rows(text);
  if (rows.size() != rows.front().values.size()) {
    throw ParseError("matrix is " + std::to_string(rows.size()) + "x" + std::to_string(rows.front().values.size()) +
                         ", expected square",
                     rows.back().line);
  }
  for (const auto& row : rows) {
    double total = 0.0;
    for (double v : row.values) {
      if (v < 0.0) throw ParseError("negative transition probability", row.line);
      total += v;
    }
    if (std::abs(total - 1.0) > kMassTolerance) {
      throw ParseError("row sums to " + format_number(total) + ", expected 1", row.line);
    }
  }
  return StochasticMatrix(to_matrix(rows));
}

Vector parse_vector_csv(std::string_view text) {
  const auto rows = parse_rows(text);
  if (rows.size() == 1) {
    return Eigen::Map<const Vector>(rows.front().values.data(), static_cast<Eigen::Index>(rows.front().values.size()));
  }
  if (rows.front().values.size() != 1) {
    throw ParseError("vector must be a single row or a single column", rows[1].line);
  }
  Vector v(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) v[static_cast<Eigen::Index>(i)] = rows[i].values.front();
  return v;
}

CostFunction parse_cost_csv(std::string_view text) {
  const auto rows = parse_rows(text);
  const bool single_row = rows.size() == 1;
  for (const auto& row : rows) {
    for (double v : row.values) {
      if (v < 0.0) throw ParseError("negative cost", row.line);
    }
  }
  if (!single_row && rows.front().values.size() != 1) {
    throw ParseError("cost must be a single row or a single column", rows[1].line);
  }
  return CostFunction(parse_vector_csv(text));
}

std::string format_number(double value) { return fmt::format("{:.17g}", value); }

std::string format_matrix_csv(const Matrix& m) {
  std::string out;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j > 0) out += ',';
      out += format_number(m(i, j));
    }
    out += '\n';
  }
  return out;
}

std::string format_vector_csv(const Vector& v) {
  std::string out;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    out += format_number(v[i]);
    out += '\n';
  }
  return out;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path.string(), 0);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
  if (!out) throw Error("failed writing " + path.string());
}

}  // namespace klmdp
