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

#include "regcal/descriptive.h"

#include <algorithm>
#include <cmath>
#include <map>

#include "regcal/error.h"
#include "regcal/numerics.h"

namespace regcal {

std::vector<GeoMeanRow> adjusted_geomean(const Table& data,
                                         const std::string& value_column,
                                         const std::vector<Adjuster>& adjusters,
                                         const std::string& group_column) {
  const auto& values = data.numeric(value_column);
  const auto groups = data.text(group_column);
  std::vector<const std::vector<double>*> adj;
  for (const auto& a : adjusters) adj.push_back(&data.numeric(a.column));

  std::vector<std::size_t> kept;
  std::map<std::string, std::size_t> group_index;
  for (std::size_t i = 0; i < data.rows(); ++i) {
    bool complete = !std::isnan(values[i]) && !groups[i].empty();
    for (const auto* col : adj) complete = complete && !std::isnan((*col)[i]);
    if (!complete) continue;
    kept.push_back(i);
    group_index.emplace(groups[i], 0);
  }
  if (kept.empty()) throw Error(ErrorCode::kTooFewRows, "no complete rows");
  std::vector<std::string> labels;
  for (auto& [label, idx] : group_index) {
    idx = labels.size();
    labels.push_back(label);
  }

  const std::size_t g = labels.size();
  const std::size_t p = g + adjusters.size();
  std::vector<std::size_t> counts(g, 0);
  Matrix x(kept.size(), p);
  std::vector<double> y(kept.size());
  std::vector<std::size_t> row_group(kept.size());
  for (std::size_t r = 0; r < kept.size(); ++r) {
    const std::size_t i = kept[r];
    const std::size_t gi = group_index.at(groups[i]);
    row_group[r] = gi;
    ++counts[gi];
    x(r, gi) = 1.0;
    for (std::size_t a = 0; a < adj.size(); ++a) x(r, g + a) = (*adj[a])[i];
    y[r] = values[i];
  }
  for (std::size_t k = 0; k < g; ++k) {
    if (counts[k] < adjusters.size() + 2) {
      throw Error(ErrorCode::kTooFewRows,
                  "group '" + labels[k] + "' has " + std::to_string(counts[k]) +
                      " complete rows; need " +
                      std::to_string(adjusters.size() + 2));
    }
  }

  const LeastSquaresResult ls = solve_least_squares(x, y);
  const double sigma2 = ls.rss / static_cast<double>(kept.size() - p);

  std::vector<GeoMeanRow> out(g);
  std::vector<double> contrast(p);
  for (std::size_t k = 0; k < g; ++k) {
    std::fill(contrast.begin(), contrast.end(), 0.0);
    contrast[k] = 1.0;
    for (std::size_t a = 0; a < adjusters.size(); ++a) {
      contrast[g + a] = adjusters[a].reference;
    }
    double pred = 0.0;
    for (std::size_t j = 0; j < p; ++j) pred += contrast[j] * ls.coefficients[j];
    double var = 0.0;
    for (std::size_t i = 0; i < p; ++i)
      for (std::size_t j = 0; j < p; ++j)
        var += contrast[i] * ls.unscaled_covariance(i, j) * contrast[j];
    const double se = std::sqrt(std::max(0.0, sigma2 * var));

    std::vector<double> adjusted;
    for (std::size_t r = 0; r < kept.size(); ++r)
      if (row_group[r] == k) adjusted.push_back(std::exp(pred + ls.residuals[r]));

    GeoMeanRow& row = out[k];
    row.group = labels[k];
    row.n = counts[k];
    row.geometric_mean = std::exp(pred);
    row.ci_low = std::exp(pred - 1.959963984540054 * se);
    row.ci_high = std::exp(pred + 1.959963984540054 * se);
    row.pct_low = empirical_quantile(adjusted, 0.025);
    row.pct_high = empirical_quantile(adjusted, 0.975);
  }
  return out;
}

double duplicate_icc(const DuplicatePairs& pairs) {
  if (pairs.size() < 3) {
    throw Error(ErrorCode::kTooFewRows, "ICC needs at least three pairs");
  }
  return pearson_correlation(pairs.first, pairs.second);
}

VarianceComponents duplicate_variance_components(const DuplicatePairs& pairs) {
  const std::size_t m = pairs.size();
  if (m < 2) throw Error(ErrorCode::kTooFewRows, "need at least two pairs");
  VarianceComponents vc;
  std::vector<double> averages(m);
  double d2 = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double d = pairs.first[i] - pairs.second[i];
    d2 += d * d;
    averages[i] = 0.5 * (pairs.first[i] + pairs.second[i]);
  }
  vc.within = d2 / (2.0 * static_cast<double>(m));
  // E[MS_between] = sigma_e^2 + 2 sigma_b^2 with MS_between = 2 Var(averages).
  const double ms_between = 2.0 * variance(averages);
  vc.between = std::max(0.0, (ms_between - vc.within) / 2.0);
  return vc;
}

double duplicate_cv(const DuplicatePairs& pairs) {
  if (pairs.size() < 2) {
    throw Error(ErrorCode::kTooFewRows, "CV needs at least two pairs");
  }
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    if (!(pairs.first[i] > 0.0) || !(pairs.second[i] > 0.0)) {
      throw Error(ErrorCode::kNonPositiveValues,
                  "CV needs positive measurements (analyte '" + pairs.analyte +
                      "')");
    }
  }
  const VarianceComponents vc = duplicate_variance_components(pairs);
  double sum = 0.0;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    sum += 0.5 * (pairs.first[i] + pairs.second[i]);
  }
  const double grand = sum / static_cast<double>(pairs.size());
  return 100.0 * std::sqrt(vc.within) / grand;
}

std::vector<DuplicatePairs> duplicate_pairs_from_long(const Table& long_format) {
  const auto analytes = long_format.text("analyte");
  const auto ids = long_format.text("id");
  const auto& replicate = long_format.numeric("replicate_index");
  const auto& value = long_format.numeric("value");

  // analyte -> id -> replicate index -> value
  std::map<std::string, std::map<std::string, std::map<double, double>>> nested;
  for (std::size_t i = 0; i < long_format.rows(); ++i) {
    if (analytes[i].empty() || ids[i].empty() || std::isnan(replicate[i]) ||
        std::isnan(value[i])) {
      continue;
    }
    nested[analytes[i]][ids[i]].emplace(replicate[i], value[i]);
  }
  std::vector<DuplicatePairs> out;
  for (const auto& [analyte, by_id] : nested) {
    DuplicatePairs pairs;
    pairs.analyte = analyte;
    for (const auto& [id, reps] : by_id) {
      if (reps.size() < 2) {
        ++pairs.dropped_half_pairs;
        continue;
      }
      auto it = reps.begin();
      pairs.first.push_back(it->second);
      pairs.second.push_back(std::next(it)->second);
    }
    out.push_back(std::move(pairs));
  }
  return out;
}

}  // namespace regcal
