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

#ifndef REGCAL_TABLE_H_
#define REGCAL_TABLE_H_

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace regcal {

// Column-oriented table. Numeric columns use NaN for a missing value, text
// columns use the empty string.
class Table {
 public:
  using NumericColumn = std::vector<double>;
  using TextColumn = std::vector<std::string>;

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return names_.size(); }
  const std::vector<std::string>& names() const noexcept { return names_; }
  bool has_column(std::string_view name) const;

  void add_numeric(std::string name, NumericColumn values);
  void add_text(std::string name, TextColumn values);

  bool is_numeric(std::string_view name) const;
  // Throws kSchemaViolation naming the column when it is absent or text.
  const NumericColumn& numeric(std::string_view name) const;
  // Text view of any column (numeric cells are formatted).
  TextColumn text(std::string_view name) const;

  Table select_rows(std::span<const std::size_t> rows) const;

 private:
  std::size_t index_of(std::string_view name) const;
  void check_length(std::size_t n, const std::string& name);

  std::size_t rows_ = 0;
  std::vector<std::string> names_;
  std::vector<std::variant<NumericColumn, TextColumn>> columns_;
};

/// Shortest decimal string that parses back to exactly `value`; "" for NaN.
std::string format_double(double value);

/// Parses a CSV stream with a mandatory header row. A column becomes
/// numeric when every non-empty cell parses fully as a double.
Table read_csv(std::istream& in);
Table read_csv_file(const std::string& path);

void write_csv(std::ostream& out, const Table& table);
void write_csv_file(const std::string& path, const Table& table);

/// Splits one CSV record (double-quoted fields supported).
std::vector<std::string> split_csv_line(std::string_view line);
std::string csv_escape(std::string_view field);

}  // namespace regcal

#endif  // REGCAL_TABLE_H_
