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

#ifndef REGCAL_TOOLS_CLI_H_
#define REGCAL_TOOLS_CLI_H_

#include <iosfwd>
#include <span>
#include <string>

namespace regcal::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitQualityGate = 3;

/// Runs one command line (without the program name). Never throws; every
/// outcome maps to kExitOk, kExitConfig or kExitQualityGate.
int run(std::span<const std::string> args, std::ostream& out, std::ostream& err);

}  // namespace regcal::cli

#endif  // REGCAL_TOOLS_CLI_H_
