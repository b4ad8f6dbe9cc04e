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

#include "regcal/simharness.h"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <mutex>
#include <thread>

#include "regcal/error.h"
#include "regcal/numerics.h"

namespace regcal {

bool ReplicationResult::failed() const {
  return std::any_of(records.begin(), records.end(),
                     [](const EstimateRecord& r) { return !r.converged; });
}

ReplicationResult run_replication(const Scenario& scenario,
                                  std::size_t rep_index,
                                  const SimulationSettings& settings) {
  const RngStream root(settings.master_seed, rep_index);
  RngStream cohort_stream = root.child(0);
  RngStream boot_stream = root.child(1);

  EstimatorSettings est = settings.estimator;
  est.age_center = scenario.age_center;
  est.bmi_center = scenario.bmi_center;

  const Cohort cohort = generate_cohort(scenario, cohort_stream);
  ReplicationResult out;
  out.rep_index = rep_index;
  out.censoring = cohort.censoring_fraction();
  out.records = estimate_strategies(settings.strategies, cohort, est, boot_stream);
  return out;
}

MethodMetrics aggregate_strategy(Strategy strategy,
                                 std::span<const EstimateRecord> records,
                                 double true_beta1) {
  std::vector<double> bias, beta, se;
  std::size_t covered = 0, rejected = 0;
  for (const auto& r : records) {
    if (r.strategy != strategy || !r.converged) continue;
    bias.push_back(100.0 * (r.beta1_hat - true_beta1) / true_beta1);
    beta.push_back(r.beta1_hat);
    se.push_back(r.se);
    if (r.ci_low <= true_beta1 && true_beta1 <= r.ci_high) ++covered;
    if (r.ci_high < 0.0 || r.ci_low > 0.0) ++rejected;
  }
  if (beta.empty()) {
    throw Error(ErrorCode::kNoSuccessfulRecords,
                std::string(to_string(strategy)) + " has no successful records");
  }
  MethodMetrics m;
  m.strategy = strategy;
  m.n_effective = beta.size();
  const double n = static_cast<double>(beta.size());
  m.mean_pct_bias = mean(bias);
  m.median_pct_bias = empirical_quantile(bias, 0.5);
  m.ase = mean(se);
  m.ese = beta.size() > 1 ? std::sqrt(variance(beta)) : 0.0;
  m.cp = static_cast<double>(covered) / n;
  m.power = static_cast<double>(rejected) / n;
  return m;
}

std::vector<MethodMetrics> aggregate(std::span<const EstimateRecord> records,
                                     double true_beta1) {
  std::vector<MethodMetrics> out;
  for (Strategy s : kAllStrategies) {
    const bool present = std::any_of(records.begin(), records.end(),
                                     [&](const auto& r) { return r.strategy == s; });
    if (present) out.push_back(aggregate_strategy(s, records, true_beta1));
  }
  return out;
}

SimulationResult run_simulation(const Scenario& scenario,
                                const SimulationSettings& settings,
                                const ProgressCallback& progress) {
  validate(scenario);
  if (settings.n_sims < 1) {
    throw Error(ErrorCode::kInvalidConfig, "n_sims must be >= 1");
  }
  const auto start = std::chrono::steady_clock::now();
  SimulationResult result;
  result.replications.resize(settings.n_sims);

  std::size_t workers = settings.workers;
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = std::min(workers, settings.n_sims);

  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> done{0};
  std::mutex error_mutex;
  std::exception_ptr error;
  std::mutex progress_mutex;

  auto work = [&] {
    for (;;) {
      const std::size_t rep = next.fetch_add(1);
      if (rep >= settings.n_sims) return;
      try {
        result.replications[rep] = run_replication(scenario, rep, settings);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        next.store(settings.n_sims);
        return;
      }
      const std::size_t finished = done.fetch_add(1) + 1;
      if (progress) {
        std::lock_guard lock(progress_mutex);
        progress(finished, settings.n_sims);
      }
    }
  };
  {
    std::vector<std::jthread> pool;
    for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(work);
    work();
  }
  if (error) std::rethrow_exception(error);

  std::vector<EstimateRecord> all;
  double censoring = 0.0;
  for (const auto& rep : result.replications) {
    if (rep.failed()) ++result.failed_replications;
    censoring += rep.censoring;
    all.insert(all.end(), rep.records.begin(), rep.records.end());
  }
  result.mean_censoring = censoring / static_cast<double>(settings.n_sims);
  result.metrics = aggregate(all, scenario.beta[0]);
  result.seconds = std::chrono::duration<double>(
                       std::chrono::steady_clock::now() - start)
                       .count();
  return result;
}

Table metrics_table(std::span<const MethodMetrics> metrics) {
  std::vector<std::string> strategy;
  std::vector<double> mean_bias, median_bias, ase, ese, cp, power, n_eff;
  for (const auto& m : metrics) {
    strategy.emplace_back(to_string(m.strategy));
    mean_bias.push_back(m.mean_pct_bias);
    median_bias.push_back(m.median_pct_bias);
    ase.push_back(m.ase);
    ese.push_back(m.ese);
    cp.push_back(m.cp);
    power.push_back(m.power);
    n_eff.push_back(static_cast<double>(m.n_effective));
  }
  Table t;
  t.add_text("strategy", std::move(strategy));
  t.add_numeric("mean_pct_bias", std::move(mean_bias));
  t.add_numeric("median_pct_bias", std::move(median_bias));
  t.add_numeric("ase", std::move(ase));
  t.add_numeric("ese", std::move(ese));
  t.add_numeric("cp", std::move(cp));
  t.add_numeric("power", std::move(power));
  t.add_numeric("n_effective", std::move(n_eff));
  return t;
}

std::string metrics_text(std::span<const MethodMetrics> metrics,
                         const std::string& title) {
  std::string out = title + "\n";
  char line[256];
  std::snprintf(line, sizeof line, "%-22s %12s %14s %8s %8s %7s %7s %6s\n",
                "strategy", "mean_%bias", "median_%bias", "ASE", "ESE", "CP",
                "power", "n_eff");
  out += line;
  for (const auto& m : metrics) {
    std::snprintf(line, sizeof line,
                  "%-22s %12.3f %14.3f %8.3f %8.3f %7.3f %7.3f %6zu\n",
                  std::string(to_string(m.strategy)).c_str(), m.mean_pct_bias,
                  m.median_pct_bias, m.ase, m.ese, m.cp, m.power, m.n_effective);
    out += line;
  }
  return out;
}

Table records_table(std::span<const ReplicationResult> replications) {
  std::vector<double> rep, beta, se, lo, hi, n_analysis, conv;
  std::vector<std::string> strategy, ci_kind, failure;
  for (const auto& r : replications) {
    for (const auto& e : r.records) {
      rep.push_back(static_cast<double>(r.rep_index));
      strategy.emplace_back(to_string(e.strategy));
      beta.push_back(e.beta1_hat);
      se.push_back(e.se);
      lo.push_back(e.ci_low);
      hi.push_back(e.ci_high);
      ci_kind.emplace_back(to_string(e.ci_kind));
      n_analysis.push_back(static_cast<double>(e.n_analysis));
      conv.push_back(e.converged ? 1.0 : 0.0);
      failure.push_back(e.failure);
    }
  }
  Table t;
  t.add_numeric("replication", std::move(rep));
  t.add_text("strategy", std::move(strategy));
  t.add_numeric("beta1_hat", std::move(beta));
  t.add_numeric("se", std::move(se));
  t.add_numeric("ci_low", std::move(lo));
  t.add_numeric("ci_high", std::move(hi));
  t.add_text("ci_kind", std::move(ci_kind));
  t.add_numeric("n_analysis", std::move(n_analysis));
  t.add_numeric("converged", std::move(conv));
  t.add_text("failure", std::move(failure));
  return t;
}

}  // namespace regcal
