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

#ifndef REGCAL_SIMHARNESS_H_
#define REGCAL_SIMHARNESS_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "regcal/datagen.h"
#include "regcal/estimators.h"
#include "regcal/table.h"

namespace regcal {

struct SimulationSettings {
  std::size_t n_sims = 2500;
  std::uint64_t master_seed = 1;
  std::size_t workers = 0;  // 0 = hardware concurrency
  std::vector<Strategy> strategies{kAllStrategies.begin(), kAllStrategies.end()};
  EstimatorSettings estimator;
};

struct ReplicationResult {
  std::size_t rep_index = 0;
  std::vector<EstimateRecord> records;
  double censoring = 0.0;

  bool failed() const;
};

/// One cohort from stream (master_seed, rep_index) and every requested
/// strategy on it. The bootstrap uses a child stream of the same pair, so
/// the result depends only on (scenario, rep_index, settings).
ReplicationResult run_replication(const Scenario& scenario,
                                  std::size_t rep_index,
                                  const SimulationSettings& settings);

struct MethodMetrics {
  Strategy strategy = Strategy::kTruth;
  double mean_pct_bias = 0.0;
  double median_pct_bias = 0.0;
  double ase = 0.0;
  double ese = 0.0;
  double cp = 0.0;
  double power = 0.0;
  std::size_t n_effective = 0;
};

/// Metrics for one strategy over its successful records. % bias is
/// 100 (beta_hat - beta) / beta with the signed true beta; power is the
/// fraction of intervals excluding 0.
MethodMetrics aggregate_strategy(Strategy strategy,
                                 std::span<const EstimateRecord> records,
                                 double true_beta1);

/// One row per strategy present in `records`, in canonical order.
/// Throws kNoSuccessfulRecords when a present strategy never succeeded.
std::vector<MethodMetrics> aggregate(std::span<const EstimateRecord> records,
                                     double true_beta1);

struct SimulationResult {
  std::vector<ReplicationResult> replications;  // indexed by rep_index
  std::vector<MethodMetrics> metrics;
  std::size_t failed_replications = 0;
  double mean_censoring = 0.0;
  double seconds = 0.0;
};

using ProgressCallback = std::function<void(std::size_t done, std::size_t total)>;

/// Runs replications 0 .. n_sims - 1 on a worker pool and aggregates.
/// Output is identical for any worker count.
SimulationResult run_simulation(const Scenario& scenario,
                                const SimulationSettings& settings,
                                const ProgressCallback& progress = {});

Table metrics_table(std::span<const MethodMetrics> metrics);
std::string metrics_text(std::span<const MethodMetrics> metrics,
                         const std::string& title);
Table records_table(std::span<const ReplicationResult> replications);

}  // namespace regcal

#endif  // REGCAL_SIMHARNESS_H_
