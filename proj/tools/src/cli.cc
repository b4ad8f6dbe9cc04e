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

#include "cli.h"

#include <functional>
#include <ostream>
#include <vector>

#include <CLI11.hpp>

#include "commands.h"
#include "regcal/datagen.h"
#include "regcal/version.h"

namespace regcal::cli {

namespace {

std::string builtin_list() {
  std::string s;
  for (const auto& n : builtin_scenario_names()) s += (s.empty() ? "" : ", ") + n;
  return s;
}

void add_lambda0_flags(CLI::App* cmd, Lambda0Options& o) {
  cmd->add_option("--lambda0", o.mode,
                  "scenario: keep the scenario's lambda0; auto: solve for the "
                  "censoring target")
      ->capture_default_str();
  cmd->add_option("--censoring-target", o.censoring_target, "Target censoring fraction")
      ->capture_default_str();
  cmd->add_option("--calibration-rows", o.calibration_rows,
                  "Cohort rows used by the lambda0 search")
      ->capture_default_str();
}

}  // namespace

int run(std::span<const std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Regression calibration for diet-disease hazard models: simulation, "
               "cohort generation and calibration-study analysis"};
  app.name("regcal");
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  std::function<int()> action;
  const std::string scenario_help =
      "Built-in scenario (" + builtin_list() + ") or path to a scenario file";

  SimulateOptions sim;
  CLI::App* simulate = app.add_subcommand("simulate", "Run the Monte Carlo study");
  simulate->add_option("--scenario", sim.scenario, scenario_help)->required();
  simulate->add_option("--sims", sim.sims, "Replications")->capture_default_str();
  simulate->add_option("--boot", sim.boot, "Bootstrap replicates per replication")
      ->capture_default_str();
  simulate->add_option("--seed", sim.seed, "Master seed")->capture_default_str();
  simulate->add_option("--workers", sim.workers, "Worker threads (0 = all cores)")
      ->capture_default_str();
  simulate->add_option("--strategies", sim.strategies,
                       "Comma-separated strategy names or 'all'")
      ->capture_default_str();
  simulate->add_option("--out", sim.out, "Output directory")->capture_default_str();
  simulate->add_option("--beta1-source", sim.beta1_source,
                       "Built-in beta1: generating or nominal")
      ->capture_default_str();
  simulate->add_option("--combine", sim.combine,
                       "Optimal combination covariance: joint or independent")
      ->capture_default_str();
  simulate->add_flag("--quiet", sim.quiet, "No progress output");
  add_lambda0_flags(simulate, sim.lambda0);
  simulate->callback([&] { action = [&] { return cmd_simulate(sim, out, err); }; });

  GenerateOptions gen;
  CLI::App* generate = app.add_subcommand("generate", "Write one synthetic cohort as CSV");
  generate->add_option("--scenario", gen.scenario, scenario_help)->required();
  auto* n_cohort = generate->add_option("--n-cohort", gen.n_cohort, "Cohort size");
  auto* n_sub = generate->add_option("--n-substudy", gen.n_substudy, "Sub-study size");
  auto* n_rel =
      generate->add_option("--n-reliability", gen.n_reliability, "Rows with a repeat");
  generate->add_option("--seed", gen.seed, "Seed")->capture_default_str();
  generate->add_option("--beta1-source", gen.beta1_source,
                       "Built-in beta1: generating or nominal")
      ->capture_default_str();
  generate->add_option("--out", gen.out, "Output CSV path")->capture_default_str();
  add_lambda0_flags(generate, gen.lambda0);
  generate->callback([&] {
    gen.n_cohort_set = n_cohort->count() > 0;
    gen.n_substudy_set = n_sub->count() > 0;
    gen.n_reliability_set = n_rel->count() > 0;
    action = [&] { return cmd_generate(gen, out, err); };
  });

  AnalyzeOptions ana;
  CLI::App* analyze =
      app.add_subcommand("analyze", "Calibration, R2, stepwise and descriptive tables");
  analyze->add_option("--cohort", ana.cohort, "Input CSV")->required();
  analyze->add_option("--spec", ana.spec, "Analysis spec (key = value)")->required();
  analyze->add_option("--out", ana.out, "Output directory")->capture_default_str();
  analyze->callback([&] { action = [&] { return cmd_analyze(ana, out, err); }; });

  ReliabilityOptions rel;
  CLI::App* reliability =
      app.add_subcommand("reliability", "ICC and CV from duplicate measurements");
  reliability->add_option("--pairs", rel.pairs,
                          "Long CSV: analyte, id, replicate_index, value")
      ->required();
  reliability->add_option("--out", rel.out, "Output directory")->capture_default_str();
  reliability->callback([&] { action = [&] { return cmd_reliability(rel, out, err); }; });

  std::vector<std::string> storage{"regcal"};
  storage.insert(storage.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& s : storage) argv.push_back(s.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }
  try {
    return action ? action() : kExitConfig;
  } catch (const std::exception& e) {
    err << "regcal: " << e.what() << "\n";
    return kExitConfig;
  }
}

}  // namespace regcal::cli
