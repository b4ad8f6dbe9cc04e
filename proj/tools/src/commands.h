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

// Per-command option structs and entry points behind regcal::cli::run.

#ifndef REGCAL_TOOLS_COMMANDS_H_
#define REGCAL_TOOLS_COMMANDS_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "regcal/datagen.h"
#include "regcal/estimators.h"

namespace regcal::cli {

enum class Lambda0Mode { kScenario, kAuto };

struct Lambda0Options {
  std::string mode = "auto";
  double censoring_target = 0.85;
  std::size_t calibration_rows = 200000;
};

struct SimulateOptions {
  std::string scenario;
  std::size_t sims = 2500;
  std::size_t boot = 200;
  std::uint64_t seed = 1;
  std::size_t workers = 0;
  std::string strategies = "all";
  std::string out = "simulation_out";
  std::string beta1_source = "generating";
  std::string combine = "joint";
  Lambda0Options lambda0;
  bool quiet = false;
};

struct GenerateOptions {
  std::string scenario;
  std::size_t n_cohort = 0;  // 0 keeps the scenario value
  std::size_t n_substudy = 0;
  std::size_t n_reliability = 0;
  bool n_cohort_set = false;
  bool n_substudy_set = false;
  bool n_reliability_set = false;
  std::uint64_t seed = 1;
  std::string beta1_source = "generating";
  Lambda0Options lambda0;
  std::string out = "cohort.csv";
};

struct AnalyzeOptions {
  std::string cohort;
  std::string spec;
  std::string out = "analysis_out";
};

struct ReliabilityOptions {
  std::string pairs;
  std::string out = "reliability_out";
};

int cmd_simulate(const SimulateOptions& o, std::ostream& out, std::ostream& err);
int cmd_generate(const GenerateOptions& o, std::ostream& out, std::ostream& err);
int cmd_analyze(const AnalyzeOptions& o, std::ostream& out, std::ostream& err);
int cmd_reliability(const ReliabilityOptions& o, std::ostream& out,
                    std::ostream& err);

// Shared helpers (options.cc). All throw regcal::Error(kInvalidConfig).
std::vector<Strategy> parse_strategy_list(const std::string& text);
CombineMode parse_combine_mode(const std::string& text);
Lambda0Mode parse_lambda0_mode(const std::string& text);
std::vector<std::string> split_words(const std::string& text);
bool parse_bool(const std::string& key, const std::string& text);
double parse_real(const std::string& key, const std::string& text);
std::size_t parse_count(const std::string& key, const std::string& text);

// Creates `dir` if needed; kIo when it cannot be created or written.
std::filesystem::path prepare_output_dir(const std::string& dir);
void write_text_file(const std::filesystem::path& path, const std::string& text);

// Reserved stream for the lambda0 search, disjoint from every replication.
RngStream calibration_stream(std::uint64_t seed);

// Applies the lambda0 mode to `scenario`; returns the achieved censoring of
// the calibration sample (NaN in scenario mode).
double resolve_lambda0(Scenario& scenario, const Lambda0Options& o,
                       std::uint64_t seed);

}  // namespace regcal::cli

#endif  // REGCAL_TOOLS_COMMANDS_H_
