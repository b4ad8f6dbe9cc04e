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

// Cox proportional hazards by Newton iteration on the Breslow log partial
// likelihood.

#ifndef REGCAL_SURVIVAL_H_
#define REGCAL_SURVIVAL_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "regcal/matrix.h"

namespace regcal {

struct SurvData {
  std::vector<double> times;
  std::vector<std::uint8_t> events;
  Matrix covariates;  // n x p
  // Non-negative frequency weights; empty means every row counts once.
  // An integer weight k is equivalent to k copies of the row.
  std::vector<double> weights;

  std::size_t size() const noexcept { return times.size(); }
  std::size_t dim() const noexcept { return covariates.cols(); }
};

/// Throws kDimensionMismatch / kInvalidConfig / kEmptyAnalysisSet when the
/// SurvData invariants (positive times, finite covariates, at least one
/// weighted event) fail.
void validate(const SurvData& data);

// Subjects sorted by decreasing time with tie groups marked, so one
// backward sweep accumulates every risk set. Depends only on the times, so
// it can be reused across refits that change weights or covariates.
class RiskSetOrder {
 public:
  explicit RiskSetOrder(std::span<const double> times);

  std::span<const std::size_t> order() const noexcept { return order_; }
  // group_start()[g] .. group_start()[g + 1] index into order() for the g-th
  // distinct time, latest time first.
  std::span<const std::size_t> group_start() const noexcept {
    return group_start_;
  }

 private:
  std::vector<std::size_t> order_;
  std::vector<std::size_t> group_start_;
};

struct PartialLikelihood {
  double value = 0.0;
  std::vector<double> score;
  Matrix information;
};

/// Log partial likelihood (Breslow ties) with its exact gradient and
/// negative Hessian. Each risk set is accumulated relative to its running
/// maximum linear predictor, so large |beta . z| does not overflow.
PartialLikelihood partial_loglik(std::span<const double> beta,
                                 const SurvData& data,
                                 const RiskSetOrder& order);
PartialLikelihood partial_loglik(std::span<const double> beta,
                                 const SurvData& data);

struct CoxOptions {
  std::vector<double> init;  // empty = zeros
  int max_iter = 25;
  double tol = 1e-8;
  int max_halvings = 10;
  double separation_bound = 50.0;
};

struct CoxFit {
  std::vector<double> beta;
  Matrix information;
  std::vector<double> se;
  double loglik = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Newton-Raphson with step halving. Converged when
/// ||score||_inf <= tol * (1 + |loglik|). A non-converged fit is returned
/// with converged = false; a singular information matrix raises
/// kRankDeficient and ||beta||_inf above separation_bound raises
/// kSeparation.
CoxFit fit_cox(const SurvData& data, const RiskSetOrder& order,
               const CoxOptions& options = {});
CoxFit fit_cox(const SurvData& data, const CoxOptions& options = {});

}  // namespace regcal

#endif  // REGCAL_SURVIVAL_H_
