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

#include <cmath>
#include <ostream>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "cli.h"
#include "commands.h"
#include "regcal/error.h"
#include "regcal/scenario_io.h"
#include "regcal/simharness.h"
#include "regcal/table.h"
#include "regcal/version.h"

namespace regcal::cli {

namespace {

constexpr double kMaxFailedFraction = 0.05;

struct SimulateConfig {
  Scenario scenario;
  SimulationSettings settings;
  std::filesystem::path out_dir;
};

SimulateConfig configure(const SimulateOptions& o) {
  SimulateConfig c;
  c.scenario = load_scenario(o.scenario, parse_beta1_source(o.beta1_source));
  SimulationSettings& s = c.settings;
  if (o.sims < 1) throw Error(ErrorCode::kInvalidConfig, "--sims must be >= 1");
  s.n_sims = o.sims;
  s.master_seed = o.seed;
  s.workers = o.workers;
  s.strategies = parse_strategy_list(o.strategies);
  s.estimator.n_boot = o.boot;
  s.estimator.combine = parse_combine_mode(o.combine);
  s.estimator.max_failed_fraction = kMaxFailedFraction;
  for (Strategy st : s.strategies) {
    if (is_calibrated(st) && o.boot < 50) {
      throw Error(ErrorCode::kInvalidConfig,
                  "--boot must be >= 50 when " + std::string(to_string(st)) +
                      " is requested");
    }
  }
  parse_lambda0_mode(o.lambda0.mode);
  c.out_dir = prepare_output_dir(o.out);
  return c;
}

std::string manifest_json(const SimulateOptions& o, const SimulateConfig& c,
                          double calibration_censoring,
                          const SimulationResult& r) {
  nlohmann::ordered_json m;
  m["tool"] = "regcal";
  m["version"] = kVersion;
  m["command"] = "simulate";
  m["scenario"] = c.scenario.name;
  m["scenario_source"] = o.scenario;
  m["master_seed"] = o.seed;
  m["n_sims"] = o.sims;
  m["n_boot"] = o.boot;
  m["workers"] = o.workers == 0 ? std::thread::hardware_concurrency() : o.workers;
  std::vector<std::string> names;
  for (Strategy s : c.settings.strategies) names.emplace_back(to_string(s));
  m["strategies"] = names;
  m["combine"] = o.combine;
  m["beta1_source"] = o.beta1_source;
  m["true_beta1"] = c.scenario.beta[0];
  m["lambda0_mode"] = o.lambda0.mode;
  m["lambda0"] = c.scenario.lambda0;
  if (std::isfinite(calibration_censoring)) {
    m["lambda0_calibration"] = {{"target_censoring", o.lambda0.censoring_target},
                                {"rows", o.lambda0.calibration_rows},
                                {"achieved_censoring", calibration_censoring}};
  }
  m["mean_censoring"] = r.mean_censoring;
  m["failed_replications"] = r.failed_replications;
  m["failed_fraction"] =
      static_cast<double>(r.failed_replications) / static_cast<double>(o.sims);
  m["seconds"] = r.seconds;
  m["replications_per_second"] = static_cast<double>(o.sims) / r.seconds;
  m["scenario_definition"] = format_scenario(c.scenario);
  return m.dump(2) + "\n";
}

}  // namespace

int cmd_simulate(const SimulateOptions& o, std::ostream& out, std::ostream& err) {
  SimulateConfig c;
  double calibration_censoring = 0.0;
  try {
    c = configure(o);
    calibration_censoring = resolve_lambda0(c.scenario, o.lambda0, o.seed);
  } catch (const Error& e) {
    err << "regcal simulate: " << e.what() << "\n";
    return kExitConfig;
  }
  if (!o.quiet) {
    err << "scenario " << c.scenario.name << ": lambda0 = "
        << format_double(c.scenario.lambda0) << " (" << o.lambda0.mode << ")";
    if (std::isfinite(calibration_censoring)) {
      err << ", calibration censoring " << calibration_censoring;
    }
    err << "\n";
  }

  SimulationResult result;
  try {
    const std::size_t every = std::max<std::size_t>(1, o.sims / 20);
    ProgressCallback progress;
    if (!o.quiet) {
      progress = [&](std::size_t done, std::size_t total) {
        if (done % every == 0 || done == total) {
          err << "  " << done << "/" << total << " replications\n";
        }
      };
    }
    result = run_simulation(c.scenario, c.settings, progress);
  } catch (const Error& e) {
    err << "regcal simulate: " << e.what() << "\n";
    return kExitQualityGate;
  }

  try {
    std::ostringstream title;
    title << "scenario " << c.scenario.name << ", " << o.sims << " replications, B = "
          << o.boot << ", seed " << o.seed;
    write_csv_file((c.out_dir / "metrics.csv").string(), metrics_table(result.metrics));
    write_text_file(c.out_dir / "metrics.txt", metrics_text(result.metrics, title.str()));
    write_csv_file((c.out_dir / "records.csv").string(),
                   records_table(result.replications));
    write_text_file(c.out_dir / "manifest.json",
                    manifest_json(o, c, calibration_censoring, result));
  } catch (const Error& e) {
    err << "regcal simulate: " << e.what() << "\n";
    return kExitConfig;
  }
  out << metrics_text(result.metrics, "scenario " + c.scenario.name);

  const double failed =
      static_cast<double>(result.failed_replications) / static_cast<double>(o.sims);
  if (failed > kMaxFailedFraction) {
    err << "regcal simulate: " << result.failed_replications << " of " << o.sims
        << " replications had a failed strategy (limit 5%)\n";
    return kExitQualityGate;
  }
  return kExitOk;
}

}  // namespace regcal::cli
