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

// Plain-text scenario files:
//
//   # beta-cryptoxanthin with a weaker exposure effect
//   base = beta_cryptoxanthin
//   beta = [-0.1 -0.105 -0.288]
//   mvn_cov = [2.7 0.53 -0.41;
//              0.53 194.1 8.35;
//              -0.41 8.35 36.9]
//
// One `key = value` per line. Vectors and matrices are bracketed lists with
// rows separated by ';' and may continue over several lines. `base` (first
// key when present) starts from a built-in scenario; `beta1_source`
// (generating | nominal) picks which reference beta_1 it carries.

#ifndef REGCAL_SCENARIO_IO_H_
#define REGCAL_SCENARIO_IO_H_

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "regcal/datagen.h"
#include "regcal/matrix.h"

namespace regcal {

// Ordered (key, value) pairs; duplicate keys raise kInvalidConfig.
using KeyValues = std::vector<std::pair<std::string, std::string>>;

KeyValues parse_key_values(std::istream& in);

/// Rows of numbers from "[a b; c d]" (commas also separate values).
std::vector<std::vector<double>> parse_number_rows(const std::string& text);
std::vector<double> parse_number_list(const std::string& text);
Matrix parse_matrix(const std::string& text);

Scenario parse_scenario(std::istream& in);
Scenario parse_scenario(const KeyValues& entries);

/// Inverse of parse_scenario; numbers use shortest round-trip formatting.
std::string format_scenario(const Scenario& scenario);

/// A built-in name or a path to a scenario file. Throws kUnknownScenario
/// when neither matches.
Scenario load_scenario(const std::string& name_or_path,
                       Beta1Source beta1 = Beta1Source::kGenerating);

Beta1Source parse_beta1_source(const std::string& text);

}  // namespace regcal

#endif  // REGCAL_SCENARIO_IO_H_
