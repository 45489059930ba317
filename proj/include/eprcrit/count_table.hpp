// Copyright 2026 The eprcrit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Coincidence-count tables and their plain-text file format.
//
//   EPRCOUNTS 1
//   variable=x            (x | p)
//   step=0.02             detector step, mm
//   gamma=0.3333333333333333
//   offset_a=-8           optional, mm
//   offset_b=-8           optional, mm
//                         exactly one blank line
//   0,3,1                 one row per z_A, columns over z_B,
//   2,7,0                 base-10 nonnegative integers, single commas
//
// Trailing whitespace on any line and trailing blank lines are accepted;
// anything else out of place is rejected with the offending line number.

#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <iterator>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "eprcrit/error.hpp"
#include "eprcrit/grid_prob.hpp"
#include "eprcrit/matrix.hpp"

namespace eprcrit {

enum class Variable { x, p };

inline std::string_view to_string(Variable v) { return v == Variable::x ? "x" : "p"; }

/// Detector geometry of one scan: step and offsets in mm of detector
/// travel; gamma maps detector position to the physical variable.
struct TableGeometry {
  Variable variable = Variable::x;
  double step_mm = 1.0;
  double gamma = 1.0;
  double offset_a = 0.0;
  double offset_b = 0.0;

  Unit physical_unit() const { return variable == Variable::x ? Unit::length : Unit::inverse_length; }

  friend bool operator==(const TableGeometry&, const TableGeometry&) = default;
};

struct CountTable {
  TableGeometry geometry;
  Matrix<std::int64_t> counts;

  std::int64_t total() const {
    std::int64_t t = 0;
    for (const auto c : counts.flat()) t += c;
    return t;
  }
  bool usable() const { return total() > 0; }

  Axis detector_axis_a() const { return Axis(geometry.offset_a, geometry.step_mm, counts.rows(), Unit::length); }
  Axis detector_axis_b() const { return Axis(geometry.offset_b, geometry.step_mm, counts.cols(), Unit::length); }
};

namespace detail {

inline std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

inline std::string_view rstrip(std::string_view s) {
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

inline double parse_real(std::string_view text, std::size_t line, std::string_view key) {
  double v = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc{} || res.ptr != text.data() + text.size() || !std::isfinite(v)) {
    throw ParseError(ErrorCode::Malformed, line, "value of '" + std::string(key) + "' is not a real number");
  }
  return v;
}

}  // namespace detail

inline void write_count_table(std::ostream& out, const CountTable& t) {
  const auto& g = t.geometry;
  out << "EPRCOUNTS 1\n";
  out << "variable=" << to_string(g.variable) << '\n';
  out << "step=" << detail::format_double(g.step_mm) << '\n';
  out << "gamma=" << detail::format_double(g.gamma) << '\n';
  if (g.offset_a != 0.0) out << "offset_a=" << detail::format_double(g.offset_a) << '\n';
  if (g.offset_b != 0.0) out << "offset_b=" << detail::format_double(g.offset_b) << '\n';
  out << '\n';
  for (std::size_t i = 0; i < t.counts.rows(); ++i) {
    const auto row = t.counts.row(i);
    for (std::size_t j = 0; j < row.size(); ++j) {
      if (j) out << ',';
      out << row[j];
    }
    out << '\n';
  }
}

inline std::string write_count_table(const CountTable& t) {
  std::ostringstream os;
  write_count_table(os, t);
  return os.str();
}

inline CountTable parse_count_table(std::string_view text) {
  std::vector<std::string_view> lines;
  for (std::size_t start = 0; start <= text.size();) {
    const std::size_t nl = text.find('\n', start);
    if (nl == std::string_view::npos) {
      if (start < text.size()) lines.push_back(text.substr(start));
      break;
    }
    lines.push_back(text.substr(start, nl - start));
    start = nl + 1;
  }
  for (auto& l : lines) l = detail::rstrip(l);
  while (!lines.empty() && lines.back().empty()) lines.pop_back();

  if (lines.empty() || lines[0] != "EPRCOUNTS 1") {
    throw ParseError(ErrorCode::BadMagic, 1, "expected 'EPRCOUNTS 1'");
  }

  CountTable table;
  bool have_variable = false, have_step = false, have_gamma = false, have_oa = false, have_ob = false;
  std::size_t k = 1;
  for (; k < lines.size() && !lines[k].empty(); ++k) {
    const std::size_t lineno = k + 1;
    const std::string_view l = lines[k];
    const std::size_t eq = l.find('=');
    if (eq == std::string_view::npos || eq == 0) {
      throw ParseError(ErrorCode::Malformed, lineno, "expected key=value header");
    }
    const std::string_view key = l.substr(0, eq);
    const std::string_view value = l.substr(eq + 1);
    auto once = [&](bool& seen) {
      if (seen) throw ParseError(ErrorCode::Malformed, lineno, "duplicate key '" + std::string(key) + "'");
      seen = true;
    };
    if (key == "variable") {
      once(have_variable);
      if (value == "x") {
        table.geometry.variable = Variable::x;
      } else if (value == "p") {
        table.geometry.variable = Variable::p;
      } else {
        throw ParseError(ErrorCode::Malformed, lineno, "variable must be x or p");
      }
    } else if (key == "step") {
      once(have_step);
      table.geometry.step_mm = detail::parse_real(value, lineno, key);
      if (!(table.geometry.step_mm > 0.0)) throw ParseError(ErrorCode::NonPositiveStep, lineno, "step must be > 0");
    } else if (key == "gamma") {
      once(have_gamma);
      table.geometry.gamma = detail::parse_real(value, lineno, key);
      if (!(table.geometry.gamma > 0.0)) throw ParseError(ErrorCode::NonPositiveGamma, lineno, "gamma must be > 0");
    } else if (key == "offset_a") {
      once(have_oa);
      table.geometry.offset_a = detail::parse_real(value, lineno, key);
    } else if (key == "offset_b") {
      once(have_ob);
      table.geometry.offset_b = detail::parse_real(value, lineno, key);
    } else {
      throw ParseError(ErrorCode::Malformed, lineno, "unknown header key '" + std::string(key) + "'");
    }
  }
  const std::size_t header_end = k + 1;  // 1-based line of the separator (or one past EOF)
  const char* missing = !have_variable ? "variable" : !have_step ? "step" : !have_gamma ? "gamma" : nullptr;
  if (missing != nullptr) {
    throw ParseError(ErrorCode::MissingHeaderKey, header_end, std::string("missing header key '") + missing + "'");
  }
  if (k >= lines.size()) throw ParseError(ErrorCode::Malformed, header_end, "missing count matrix");
  ++k;  // the single blank separator

  std::vector<std::int64_t> cells;
  std::size_t cols = 0;
  std::size_t rows = 0;
  const std::size_t first_matrix_line = k + 1;
  for (; k < lines.size(); ++k) {
    const std::size_t lineno = k + 1;
    const std::string_view l = lines[k];
    if (l.empty()) throw ParseError(ErrorCode::Malformed, lineno, "blank line inside the count matrix");
    std::size_t n = 0;
    for (std::size_t pos = 0;;) {
      const std::size_t comma = l.find(',', pos);
      const std::string_view cell = l.substr(pos, comma == std::string_view::npos ? l.npos : comma - pos);
      if (cell.empty()) throw ParseError(ErrorCode::Malformed, lineno, "empty cell");
      if (cell[0] == '-') {
        std::int64_t probe = 0;
        const auto r = std::from_chars(cell.data() + 1, cell.data() + cell.size(), probe);
        if (cell.size() > 1 && r.ptr == cell.data() + cell.size()) {
          throw ParseError(ErrorCode::NegativeCount, lineno, "negative count " + std::string(cell));
        }
        throw ParseError(ErrorCode::Malformed, lineno, "bad cell '" + std::string(cell) + "'");
      }
      std::int64_t value = 0;
      const auto r = std::from_chars(cell.data(), cell.data() + cell.size(), value);
      if (r.ec != std::errc{} || r.ptr != cell.data() + cell.size()) {
        throw ParseError(ErrorCode::Malformed, lineno, "bad cell '" + std::string(cell) + "'");
      }
      cells.push_back(value);
      ++n;
      if (comma == std::string_view::npos) break;
      pos = comma + 1;
    }
    if (rows == 0) {
      cols = n;
    } else if (n != cols) {
      throw ParseError(ErrorCode::RaggedMatrix, lineno,
                       "row has " + std::to_string(n) + " cells, expected " + std::to_string(cols));
    }
    ++rows;
  }
  if (rows < 2 || cols < 2) {
    throw ParseError(ErrorCode::Malformed, first_matrix_line, "count matrix must be at least 2x2");
  }
  table.counts = Matrix<std::int64_t>(rows, cols);
  std::copy(cells.begin(), cells.end(), table.counts.flat().begin());
  if (!table.usable()) throw ParseError(ErrorCode::ZeroTotalCounts, first_matrix_line, "every count is zero");
  return table;
}

inline CountTable parse_count_table(std::istream& in) {
  const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_count_table(std::string_view(text));
}

/// Reads a table from disk; errors carry the path.
inline CountTable read_count_table(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open '" + path + "'");
  try {
    return parse_count_table(in);
  } catch (const ParseError& e) {
    throw e.from_source(path);
  }
}

inline void save_count_table(const std::string& path, const CountTable& t) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::Io, "cannot open '" + path + "' for writing");
  write_count_table(out, t);
  out.flush();
  if (!out) throw Error(ErrorCode::Io, "failed writing '" + path + "'");
}

}  // namespace eprcrit
