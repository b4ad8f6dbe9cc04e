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

#include "regcal/survival.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "regcal/error.h"
#include "regcal/numerics.h"

namespace regcal {

void validate(const SurvData& data) {
  const std::size_t n = data.times.size();
  if (data.events.size() != n || data.covariates.rows() != n) {
    throw Error(ErrorCode::kDimensionMismatch,
                "times, events and covariates must have equal length");
  }
  if (!data.weights.empty() && data.weights.size() != n) {
    throw Error(ErrorCode::kDimensionMismatch, "weights length");
  }
  if (n == 0) throw Error(ErrorCode::kEmptyAnalysisSet, "no subjects");
  double weighted_events = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!(data.times[i] > 0.0) || !std::isfinite(data.times[i])) {
      throw Error(ErrorCode::kInvalidConfig,
                  "event times must be positive and finite");
    }
    const double w = data.weights.empty() ? 1.0 : data.weights[i];
    if (!(w >= 0.0)) throw Error(ErrorCode::kInvalidConfig, "negative weight");
    if (data.events[i]) weighted_events += w;
  }
  if (!data.covariates.all_finite()) {
    throw Error(ErrorCode::kInvalidConfig, "non-finite covariate");
  }
  if (!(weighted_events > 0.0)) {
    throw Error(ErrorCode::kEmptyAnalysisSet, "no events");
  }
}

RiskSetOrder::RiskSetOrder(std::span<const double> times) {
  order_.resize(times.size());
  std::iota(order_.begin(), order_.end(), std::size_t{0});
  std::stable_sort(order_.begin(), order_.end(),
                   [&](std::size_t a, std::size_t b) { return times[a] > times[b]; });
  for (std::size_t k = 0; k < order_.size(); ++k) {
    if (k == 0 || times[order_[k]] != times[order_[k - 1]]) {
      group_start_.push_back(k);
    }
  }
  group_start_.push_back(order_.size());
}

PartialLikelihood partial_loglik(std::span<const double> beta,
                                 const SurvData& data,
                                 const RiskSetOrder& order) {
  const std::size_t p = data.dim();
  if (beta.size() != p) {
    throw Error(ErrorCode::kDimensionMismatch, "beta length");
  }
  const bool weighted = !data.weights.empty();
  const auto ord = order.order();
  const auto groups = order.group_start();

  PartialLikelihood out;
  out.score.assign(p, 0.0);
  out.information = Matrix(p, p);

  // Risk-set sums scaled by exp(-shift); shift is the running max of eta.
  double shift = -std::numeric_limits<double>::infinity();
  double s0 = 0.0;
  std::vector<double> s1(p, 0.0);
  std::vector<double> s2(p * p, 0.0);
  std::vector<double> event_z(p);
  std::vector<double> mean_z(p);

  for (std::size_t g = 0; g + 1 < groups.size(); ++g) {
    double event_weight = 0.0;
    double event_eta = 0.0;
    std::fill(event_z.begin(), event_z.end(), 0.0);

    for (std::size_t k = groups[g]; k < groups[g + 1]; ++k) {
      const std::size_t i = ord[k];
      const double w = weighted ? data.weights[i] : 1.0;
      if (w == 0.0) continue;
      const auto z = data.covariates.row(i);
      double eta = 0.0;
      for (std::size_t a = 0; a < p; ++a) eta += beta[a] * z[a];
      if (eta > shift) {
        const double rescale = std::exp(shift - eta);
        s0 *= rescale;
        for (double& v : s1) v *= rescale;
        for (double& v : s2) v *= rescale;
        shift = eta;
      }
      const double r = w * std::exp(eta - shift);
      s0 += r;
      for (std::size_t a = 0; a < p; ++a) {
        const double rza = r * z[a];
        s1[a] += rza;
        for (std::size_t b = 0; b <= a; ++b) s2[a * p + b] += rza * z[b];
      }
      if (data.events[i]) {
        event_weight += w;
        event_eta += w * eta;
        for (std::size_t a = 0; a < p; ++a) event_z[a] += w * z[a];
      }
    }
    if (event_weight == 0.0) continue;

    out.value += event_eta - event_weight * (std::log(s0) + shift);
    for (std::size_t a = 0; a < p; ++a) {
      mean_z[a] = s1[a] / s0;
      out.score[a] += event_z[a] - event_weight * mean_z[a];
    }
    for (std::size_t a = 0; a < p; ++a)
      for (std::size_t b = 0; b <= a; ++b) {
        out.information(a, b) +=
            event_weight * (s2[a * p + b] / s0 - mean_z[a] * mean_z[b]);
      }
  }
  for (std::size_t a = 0; a < p; ++a)
    for (std::size_t b = 0; b < a; ++b)
      out.information(b, a) = out.information(a, b);
  return out;
}

PartialLikelihood partial_loglik(std::span<const double> beta,
                                 const SurvData& data) {
  return partial_loglik(beta, data, RiskSetOrder(data.times));
}

namespace {

double sup_norm(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

constexpr double kRoundoffFloor =
    64.0 * std::numeric_limits<double>::epsilon();

bool score_converged(const PartialLikelihood& pl, double tol) {
  return sup_norm(pl.score) <= tol * (1.0 + std::abs(pl.value));
}

Matrix factor_information(const Matrix& information) {
  try {
    return cholesky(information);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kNotPositiveDefinite) {
      throw Error(ErrorCode::kRankDeficient,
                  "Cox information matrix is singular (constant or collinear "
                  "covariate?)");
    }
    throw;
  }
}

}  // namespace

CoxFit fit_cox(const SurvData& data, const RiskSetOrder& order,
               const CoxOptions& options) {
  validate(data);
  const std::size_t p = data.dim();
  std::vector<double> beta =
      options.init.empty() ? std::vector<double>(p, 0.0) : options.init;
  if (beta.size() != p) {
    throw Error(ErrorCode::kDimensionMismatch, "initial beta length");
  }

  CoxFit fit;
  PartialLikelihood current = partial_loglik(beta, data, order);
  std::vector<double> step(p);
  std::vector<double> trial(p);
  int iter = 0;
  for (; iter < options.max_iter; ++iter) {
    if (score_converged(current, options.tol)) {
      fit.converged = true;
      break;
    }
    Matrix l;
    try {
      l = factor_information(current.information);
    } catch (const Error& e) {
      // Information that was regular at the start and collapsed along an
      // ascent path is the signature of a monotone likelihood.
      if (iter == 0 || e.code() != ErrorCode::kRankDeficient) throw;
      throw Error(ErrorCode::kSeparation,
                  "information became singular while the partial likelihood "
                  "kept increasing");
    }
    std::copy(current.score.begin(), current.score.end(), step.begin());
    solve_lower(l, step);
    solve_lower_transpose(l, step);

    double scale = 1.0;
    PartialLikelihood candidate;
    bool accepted = false;
    for (int halving = 0; halving <= options.max_halvings; ++halving) {
      for (std::size_t a = 0; a < p; ++a) trial[a] = beta[a] + scale * step[a];
      candidate = partial_loglik(trial, data, order);
      if (std::isfinite(candidate.value) && candidate.value >= current.value) {
        accepted = true;
        break;
      }
      scale *= 0.5;
    }
    if (!accepted) {
      // No ascent is representable: the predicted gain is below the
      // rounding noise of the log-likelihood, so beta is stationary.
      double decrement = 0.0;
      for (std::size_t a = 0; a < p; ++a) decrement += current.score[a] * step[a];
      if (decrement <= kRoundoffFloor * (1.0 + std::abs(current.value))) {
        fit.converged = true;
      }
      break;
    }
    beta = trial;
    current = std::move(candidate);
    if (sup_norm(beta) > options.separation_bound) {
      throw Error(ErrorCode::kSeparation,
                  "|beta| exceeded " + std::to_string(options.separation_bound) +
                      "; partial likelihood appears monotone");
    }
  }
  if (!fit.converged && score_converged(current, options.tol)) {
    fit.converged = true;
  }

  fit.beta = std::move(beta);
  fit.loglik = current.value;
  fit.iterations = iter;
  fit.information = current.information;
  fit.se.assign(p, std::numeric_limits<double>::quiet_NaN());
  try {
    const Matrix cov = invert_spd(current.information);
    for (std::size_t a = 0; a < p; ++a) fit.se[a] = std::sqrt(cov(a, a));
  } catch (const Error& e) {
    if (fit.converged) {
      throw Error(ErrorCode::kRankDeficient,
                  "information singular at the estimate");
    }
  }
  return fit;
}

CoxFit fit_cox(const SurvData& data, const CoxOptions& options) {
  return fit_cox(data, RiskSetOrder(data.times), options);
}

}  // namespace regcal
