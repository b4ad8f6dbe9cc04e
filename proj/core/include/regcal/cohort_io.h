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

#ifndef REGCAL_COHORT_IO_H_
#define REGCAL_COHORT_IO_H_

#include <string>

#include "regcal/datagen.h"
#include "regcal/table.h"

namespace regcal {

// Column order of the cohort CSV.
inline constexpr const char* kCohortColumns[] = {
    "id",         "x_star",     "age",         "bmi",
    "x_true",     "x_biomarker", "x_biomarker_repeat", "event_time",
    "event",      "in_substudy", "in_reliability"};

Table cohort_to_table(const Cohort& cohort);

/// Throws kSchemaViolation naming the first absent or malformed column.
/// x_true may be empty on ingested real data; it is then NaN.
Cohort cohort_from_table(const Table& table);

void write_cohort_csv(const std::string& path, const Cohort& cohort);
Cohort read_cohort_csv(const std::string& path);

}  // namespace regcal

#endif  // REGCAL_COHORT_IO_H_
