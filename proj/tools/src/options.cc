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
#include <fstream>
#include <limits>
#include <sstream>

#include "commands.h"
#include "regcal/error.h"

namespace regcal::cli {

namespace {

[[noreturn]] void bad(const std::string& message) {
  throw Error(ErrorCode::kInvalidConfig, message);
}

}  // namespace

std::vector<std::string> split_words(const std::string& text) {
  std::string normalized = text;
  for (char& c : normalized) {
    if (c == ',' || c == ';') c = ' ';
  }
  std::istringstream in(normalized);
  std::vector<std::string> words;
  for (std::string w; in >> w;) words.push_back(w);
  return words;
}

std::vector<Strategy> parse_strategy_list(const std::string& text) {
  const std::vector<std::string> words = split_words(text);
  if (words.size() == 1 && words[0] == "all") {
    return {kAllStrategies.begin(), kAllStrategies.end()};
  }
  if (words.empty()) bad("--strategies is empty");
  std::vector<Strategy> out;
  for (const auto& w : words) {
    const auto s = parse_strategy(w);
    if (!s) bad("unknown strategy '" + w + "'");
    for (Strategy seen : out) {
      if (seen == *s) bad("strategy '" + w + "' listed twice");
    }
    out.push_back(*s);
  }
  return out;
}

CombineMode parse_combine_mode(const std::string& text) {
  if (text == "joint") return CombineMode::kJointCovariance;
  if (text == "independent") return CombineMode::kIndependent;
  bad("--combine must be 'joint' or 'independent', got '" + text + "'");
}

Lambda0Mode parse_lambda0_mode(const std::string& text) {
  if (text == "scenario") return Lambda0Mode::kScenario;
  if (text == "auto") return Lambda0Mode::kAuto;
  bad("--lambda0 must be 'scenario' or 'auto', got '" + text + "'");
}

bool parse_bool(const std::string& key, const std::string& text) {
  if (text == "true" || text == "yes" || text == "1") return true;
  if (text == "false" || text == "no" || text == "0") return false;
  bad(key + ": expected true/false, got '" + text + "'");
}

double parse_real(const std::string& key, const std::string& text) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size() || !std::isfinite(v)) {
    bad(key + ": expected a number, got '" + text + "'");
  }
  return v;
}

std::size_t parse_count(const std::string& key, const std::string& text) {
  const double v = parse_real(key, text);
  if (v < 0 || v != std::floor(v) || v > 1e15) {
    bad(key + ": expected a non-negative integer, got '" + text + "'");
  }
  return static_cast<std::size_t>(v);
}

std::filesystem::path prepare_output_dir(const std::string& dir) {
  namespace fs = std::filesystem;
  const fs::path p(dir);
  std::error_code ec;
  fs::create_directories(p, ec);
  if (ec || !fs::is_directory(p)) {
    throw Error(ErrorCode::kIo, "cannot create output directory '" + dir + "'");
  }
  const fs::path probe = p / ".write_probe";
  {
    std::ofstream f(probe);
    if (!f) throw Error(ErrorCode::kIo, "output directory '" + dir + "' is not writable");
  }
  fs::remove(probe, ec);
  return p;
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  f << text;
  if (!f) throw Error(ErrorCode::kIo, "cannot write '" + path.string() + "'");
}

RngStream calibration_stream(std::uint64_t seed) {
  return RngStream(seed, std::numeric_limits<std::uint64_t>::max());
}

double resolve_lambda0(Scenario& scenario, const Lambda0Options& o,
                       std::uint64_t seed) {
  if (parse_lambda0_mode(o.mode) == Lambda0Mode::kScenario) {
    return std::numeric_limits<double>::quiet_NaN();
  }
  if (!(o.censoring_target > 0.0 && o.censoring_target < 1.0)) {
    bad("--censoring-target must lie in (0, 1)");
  }
  if (o.calibration_rows < 1000) bad("--calibration-rows must be >= 1000");
  RngStream stream = calibration_stream(seed);
  return calibrate_lambda0(scenario, o.censoring_target, stream, o.calibration_rows)
      .achieved_censoring;
}

}  // namespace regcal::cli
