// Copyright 2026 The regcal Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "regcal/table.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>

#include "regcal/error.h"

namespace regcal {
namespace {

bool parse_double(std::string_view s, double& out) {
  if (s.empty()) return false;
  const char* begin = s.data();
  const char* end = s.data() + s.size();
  if (*begin == '+') ++begin;
  auto [ptr, ec] = std::from_chars(begin, end, out);
  return ec == std::errc() && ptr == end;
}

// One CSV record; quoted fields may span physical lines.
bool read_record(std::istream& in, std::string& record, std::size_t& line_no) {
  if (!std::getline(in, record)) return false;
  ++line_no;
  auto quotes = std::count(record.begin(), record.end(), '"');
  std::string more;
  while (quotes % 2 == 1 && std::getline(in, more)) {
    ++line_no;
    record += '\n';
    record += more;
    quotes += std::count(more.begin(), more.end(), '"');
  }
  return true;
}

std::string_view trim_cr(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  return line;
}

}  // namespace

bool Table::has_column(std::string_view name) const {
  for (const auto& n : names_)
    if (n == name) return true;
  return false;
}

std::size_t Table::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < names_.size(); ++i)
    if (names_[i] == name) return i;
  throw Error(ErrorCode::kSchemaViolation,
              "missing column '" + std::string(name) + "'");
}

void Table::check_length(std::size_t n, const std::string& name) {
  if (has_column(name)) {
    throw Error(ErrorCode::kSchemaViolation, "duplicate column '" + name + "'");
  }
  if (!names_.empty() && n != rows_) {
    throw Error(ErrorCode::kDimensionMismatch,
                "column '" + name + "' has the wrong length");
  }
  rows_ = n;
}

void Table::add_numeric(std::string name, NumericColumn values) {
  check_length(values.size(), name);
  names_.push_back(std::move(name));
  columns_.emplace_back(std::move(values));
}

void Table::add_text(std::string name, TextColumn values) {
  check_length(values.size(), name);
  names_.push_back(std::move(name));
  columns_.emplace_back(std::move(values));
}

bool Table::is_numeric(std::string_view name) const {
  return std::holds_alternative<NumericColumn>(columns_[index_of(name)]);
}

const Table::NumericColumn& Table::numeric(std::string_view name) const {
  const auto& col = columns_[index_of(name)];
  if (const auto* num = std::get_if<NumericColumn>(&col)) return *num;
  throw Error(ErrorCode::kSchemaViolation,
              "column '" + std::string(name) + "' is not numeric");
}

Table::TextColumn Table::text(std::string_view name) const {
  const auto& col = columns_[index_of(name)];
  if (const auto* txt = std::get_if<TextColumn>(&col)) return *txt;
  const auto& num = std::get<NumericColumn>(col);
  TextColumn out;
  out.reserve(num.size());
  for (double v : num) out.push_back(format_double(v));
  return out;
}

Table Table::select_rows(std::span<const std::size_t> rows) const {
  Table out;
  for (std::size_t c = 0; c < names_.size(); ++c) {
    std::visit(
        [&](const auto& col) {
          std::decay_t<decltype(col)> picked;
          picked.reserve(rows.size());
          for (std::size_t r : rows) picked.push_back(col.at(r));
          out.names_.push_back(names_[c]);
          out.columns_.emplace_back(std::move(picked));
        },
        columns_[c]);
  }
  out.rows_ = rows.size();
  return out;
}

std::string format_double(double value) {
  if (std::isnan(value)) return {};
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, ptr);
}

std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(field));
      field.clear();
    } else {
      field += c;
    }
  }
  fields.push_back(std::move(field));
  return fields;
}

std::string csv_escape(std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) {
    return std::string(field);
  }
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

Table read_csv(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  if (!read_record(in, line, line_no)) {
    throw Error(ErrorCode::kSchemaViolation, "CSV input has no header row");
  }
  const auto header = split_csv_line(trim_cr(line));
  std::vector<std::vector<std::string>> cells(header.size());
  while (read_record(in, line, line_no)) {
    const auto view = trim_cr(line);
    if (view.empty()) continue;
    auto fields = split_csv_line(view);
    if (fields.size() != header.size()) {
      throw Error(ErrorCode::kSchemaViolation,
                  "line " + std::to_string(line_no) + " has " +
                      std::to_string(fields.size()) + " fields, header has " +
                      std::to_string(header.size()));
    }
    for (std::size_t c = 0; c < fields.size(); ++c) {
      cells[c].push_back(std::move(fields[c]));
    }
  }

  Table table;
  for (std::size_t c = 0; c < header.size(); ++c) {
    std::vector<double> numbers(cells[c].size());
    bool numeric = true;
    for (std::size_t r = 0; r < cells[c].size() && numeric; ++r) {
      const auto& cell = cells[c][r];
      if (cell.empty()) {
        numbers[r] = std::numeric_limits<double>::quiet_NaN();
      } else {
        numeric = parse_double(cell, numbers[r]);
      }
    }
    if (numeric) {
      table.add_numeric(header[c], std::move(numbers));
    } else {
      table.add_text(header[c], std::move(cells[c]));
    }
  }
  return table;
}

Table read_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open '" + path + "'");
  return read_csv(in);
}

void write_csv(std::ostream& out, const Table& table) {
  const auto& names = table.names();
  for (std::size_t c = 0; c < names.size(); ++c) {
    if (c) out << ',';
    out << csv_escape(names[c]);
  }
  out << '\n';
  std::vector<Table::TextColumn> cols;
  cols.reserve(names.size());
  for (const auto& n : names) cols.push_back(table.text(n));
  for (std::size_t r = 0; r < table.rows(); ++r) {
    // A lone empty field would read back as a blank (skipped) line.
    if (cols.size() == 1 && cols[0][r].empty()) {
      out << "\"\"\n";
      continue;
    }
    for (std::size_t c = 0; c < cols.size(); ++c) {
      if (c) out << ',';
      out << csv_escape(cols[c][r]);
    }
    out << '\n';
  }
}

void write_csv_file(const std::string& path, const Table& table) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIo, "cannot write '" + path + "'");
  write_csv(out, table);
  if (!out) throw Error(ErrorCode::kIo, "write failed for '" + path + "'");
}

}  // namespace regcal
