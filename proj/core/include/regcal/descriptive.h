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

#ifndef REGCAL_DESCRIPTIVE_H_
#define REGCAL_DESCRIPTIVE_H_

#include <cstddef>
#include <string>
#include <vector>

#include "regcal/table.h"

namespace regcal {

struct Adjuster {
  std::string column;
  double reference = 0.0;
};

struct GeoMeanRow {
  std::string group;
  std::size_t n = 0;
  double geometric_mean = 0.0;
  // exp(prediction +- 1.96 SE(prediction)).
  double ci_low = 0.0;
  double ci_high = 0.0;
  // 2.5th / 97.5th percentiles of the covariate-adjusted values.
  double pct_low = 0.0;
  double pct_high = 0.0;
};

/// Geometric means per group adjusted to the adjusters' reference values:
/// log-value ~ group indicators + adjusters, evaluated at the reference
/// point. `value_column` must already be on the log scale. Groups are
/// reported in lexicographic order; rows with a missing field are dropped.
/// Throws kTooFewRows when a group has fewer than adjusters + 2 rows.
std::vector<GeoMeanRow> adjusted_geomean(const Table& data,
                                         const std::string& value_column,
                                         const std::vector<Adjuster>& adjusters,
                                         const std::string& group_column);

struct DuplicatePairs {
  std::string analyte;
  std::vector<double> first;
  std::vector<double> second;
  std::size_t dropped_half_pairs = 0;

  std::size_t size() const noexcept { return first.size(); }
};

/// Pearson correlation between first and second measurements.
/// Needs >= 3 pairs; kDegenerateVariance when either side is constant.
double duplicate_icc(const DuplicatePairs& pairs);

struct VarianceComponents {
  double within = 0.0;
  double between = 0.0;  // clamped at 0
};

/// Balanced random-intercepts moments for duplicate pairs.
VarianceComponents duplicate_variance_components(const DuplicatePairs& pairs);

/// 100 * sqrt(sum d_i^2 / (2m)) / mean of the pair averages.
/// Needs >= 2 pairs of positive values (kNonPositiveValues otherwise).
double duplicate_cv(const DuplicatePairs& pairs);

/// Long-format input with columns analyte, id, replicate_index, value.
/// Each id contributes its two lowest replicate indices as a pair; ids
/// with a single usable measurement are counted in dropped_half_pairs.
std::vector<DuplicatePairs> duplicate_pairs_from_long(const Table& long_format);

}  // namespace regcal

#endif  // REGCAL_DESCRIPTIVE_H_
