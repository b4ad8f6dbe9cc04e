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

#include "regcal/error.h"

namespace regcal {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kNotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorCode::kRankDeficient: return "RankDeficient";
    case ErrorCode::kEmptyInput: return "EmptyInput";
    case ErrorCode::kUnknownScenario: return "UnknownScenario";
    case ErrorCode::kInvalidConfig: return "InvalidConfig";
    case ErrorCode::kNegativeErrorVariance: return "NegativeErrorVariance";
    case ErrorCode::kNonPositiveRate: return "NonPositiveRate";
    case ErrorCode::kNoBracket: return "NoBracket";
    case ErrorCode::kTooFewRows: return "TooFewRows";
    case ErrorCode::kExcessMissingness: return "ExcessMissingness";
    case ErrorCode::kInvalidIcc: return "InvalidIcc";
    case ErrorCode::kNotNested: return "NotNested";
    case ErrorCode::kDegenerateResample: return "DegenerateResample";
    case ErrorCode::kNotConverged: return "NotConverged";
    case ErrorCode::kSeparation: return "Separation";
    case ErrorCode::kMissingFit: return "MissingFit";
    case ErrorCode::kEmptyAnalysisSet: return "EmptyAnalysisSet";
    case ErrorCode::kTooManyFailedReplicates: return "TooManyFailedReplicates";
    case ErrorCode::kSingularCovariance: return "SingularCovariance";
    case ErrorCode::kDegenerateVariance: return "DegenerateVariance";
    case ErrorCode::kNonPositiveValues: return "NonPositiveValues";
    case ErrorCode::kNoSuccessfulRecords: return "NoSuccessfulRecords";
    case ErrorCode::kSchemaViolation: return "SchemaViolation";
    case ErrorCode::kIo: return "Io";
  }
  return "Unknown";
}

}  // namespace regcal
