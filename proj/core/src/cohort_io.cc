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

#include "regcal/cohort_io.h"

#include <cmath>
#include <limits>

#include "regcal/error.h"

namespace regcal {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double opt(const std::optional<double>& v) { return v ? *v : kNaN; }

bool flag(double v, const char* column, std::size_t row) {
  if (v == 0.0) return false;
  if (v == 1.0) return true;
  throw Error(ErrorCode::kSchemaViolation,
              std::string("column '") + column + "' row " + std::to_string(row + 1) +
                  " must be 0 or 1");
}

}  // namespace

Table cohort_to_table(const Cohort& cohort) {
  const std::size_t n = cohort.rows.size();
  std::vector<std::vector<double>> cols(std::size(kCohortColumns),
                                        std::vector<double>(n));
  for (std::size_t i = 0; i < n; ++i) {
    const CohortRow& r = cohort.rows[i];
    const double values[] = {static_cast<double>(r.id),
                             r.x_star,
                             r.age,
                             r.bmi,
                             r.x_true,
                             opt(r.x_biomarker),
                             opt(r.x_biomarker_repeat),
                             r.event_time,
                             r.event ? 1.0 : 0.0,
                             r.in_substudy ? 1.0 : 0.0,
                             r.in_reliability ? 1.0 : 0.0};
    for (std::size_t c = 0; c < cols.size(); ++c) cols[c][i] = values[c];
  }
  Table t;
  for (std::size_t c = 0; c < cols.size(); ++c) {
    t.add_numeric(kCohortColumns[c], std::move(cols[c]));
  }
  return t;
}

Cohort cohort_from_table(const Table& table) {
  std::vector<const std::vector<double>*> cols;
  for (const char* name : kCohortColumns) cols.push_back(&table.numeric(name));
  auto required = [&](std::size_t c, std::size_t row) {
    const double v = (*cols[c])[row];
    if (std::isnan(v)) {
      throw Error(ErrorCode::kSchemaViolation,
                  std::string("column '") + kCohortColumns[c] + "' row " +
                      std::to_string(row + 1) + " is empty");
    }
    return v;
  };
  Cohort cohort;
  cohort.rows.resize(table.rows());
  for (std::size_t i = 0; i < table.rows(); ++i) {
    CohortRow& r = cohort.rows[i];
    r.id = static_cast<std::size_t>(required(0, i));
    r.x_star = required(1, i);
    r.age = required(2, i);
    r.bmi = required(3, i);
    r.x_true = (*cols[4])[i];
    if (!std::isnan((*cols[5])[i])) r.x_biomarker = (*cols[5])[i];
    if (!std::isnan((*cols[6])[i])) r.x_biomarker_repeat = (*cols[6])[i];
    r.event_time = required(7, i);
    r.event = flag(required(8, i), kCohortColumns[8], i);
    r.in_substudy = flag(required(9, i), kCohortColumns[9], i);
    r.in_reliability = flag(required(10, i), kCohortColumns[10], i);
  }
  return cohort;
}

void write_cohort_csv(const std::string& path, const Cohort& cohort) {
  write_csv_file(path, cohort_to_table(cohort));
}

Cohort read_cohort_csv(const std::string& path) {
  return cohort_from_table(read_csv_file(path));
}

}  // namespace regcal
