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

#include "regcal/datagen.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "regcal/error.h"
#include "regcal/numerics.h"

namespace regcal {
namespace {

constexpr double kAgeMean = 45.81989;
constexpr double kBmiMean = 29.77589;
constexpr double kAgeVar = 194.0924;
constexpr double kBmiVar = 36.88889;
constexpr double kAgeBmiCov = 8.354409;

struct BuiltinConstants {
  std::string_view name;
  double x_star_mean;
  double x_star_var;
  double x_star_age_cov;
  double x_star_bmi_cov;
  std::array<double, 4> alpha;
  double r2_target;
  double sigma_eps2;
  double hr_generating;
  double hr_nominal;
  double lambda0;
};

// Means, covariances, R^2 targets, error variances, hazard ratios and
// baseline rates from the simulation design; alpha from the fitted
// calibration models (intercept, self-report, age, BMI).
constexpr BuiltinConstants kBuiltins[] = {
    {"beta_cryptoxanthin", 3.261392, 2.7095730, 0.5280317, -0.4143209,
     {1.287, 0.112, 0.000, -0.013}, 0.5034792, 0.01070956, 0.775, 0.862,
     650.0},
    {"lycopene", 5.605585, 9.0749150, -2.9817190, -0.6255943,
     {2.472, 0.011, -0.003, -0.004}, 0.2196337, 0.004405707, 0.529, 0.451,
     2000.0},
    {"folate", 5.736064, 0.2948574, -0.6786461, -0.2807268,
     {3.049, 0.090, 0.004, -0.010}, 0.1716752, 0.02127483, 0.665, 0.651,
     1600.0},
};

const BuiltinConstants& find_builtin(std::string_view name) {
  for (const auto& b : kBuiltins)
    if (b.name == name) return b;
  std::string known;
  for (const auto& b : kBuiltins) {
    if (!known.empty()) known += ", ";
    known += b.name;
  }
  throw Error(ErrorCode::kUnknownScenario,
              "unknown scenario '" + std::string(name) + "' (known: " + known +
                  ")");
}

double linear_predictor(const Scenario& s, double x_star, double age,
                        double bmi) {
  return s.alpha[0] + s.alpha[1] * x_star + s.alpha[2] * (age - s.age_center) +
         s.alpha[3] * (bmi - s.bmi_center);
}

}  // namespace

std::vector<std::string> builtin_scenario_names() {
  std::vector<std::string> names;
  for (const auto& b : kBuiltins) names.emplace_back(b.name);
  return names;
}

double reference_beta1(std::string_view name, Beta1Source source) {
  const auto& b = find_builtin(name);
  return std::log(source == Beta1Source::kGenerating ? b.hr_generating
                                                     : b.hr_nominal);
}

Scenario build_scenario(std::string_view name, Beta1Source beta1) {
  const auto& b = find_builtin(name);
  Scenario s;
  s.name = std::string(b.name);
  s.mvn_mean = {b.x_star_mean, kAgeMean, kBmiMean};
  s.mvn_cov = Matrix{{b.x_star_var, b.x_star_age_cov, b.x_star_bmi_cov},
                     {b.x_star_age_cov, kAgeVar, kAgeBmiCov},
                     {b.x_star_bmi_cov, kAgeBmiCov, kBmiVar}};
  s.alpha = b.alpha;
  s.r2_target = b.r2_target;
  s.sigma_eps2 = b.sigma_eps2;
  s.beta = {reference_beta1(name, beta1), std::log(0.9), std::log(0.75)};
  s.lambda0 = b.lambda0;
  validate(s);
  return s;
}

double calibration_signal_variance(const std::array<double, 4>& alpha,
                                   const Matrix& cov) {
  double a = 0.0;
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j)
      a += alpha[i + 1] * alpha[j + 1] * cov(i, j);
  return a;
}

ErrorVariances implied_error_variances(const Scenario& scenario) {
  ErrorVariances v;
  v.signal = calibration_signal_variance(scenario.alpha, scenario.mvn_cov);
  v.total = v.signal * (1.0 - scenario.r2_target) / scenario.r2_target;
  v.u = v.total - scenario.sigma_eps2;
  if (!(v.u > 0.0)) {
    throw Error(ErrorCode::kNegativeErrorVariance,
                "sigma_eps2 = " + std::to_string(scenario.sigma_eps2) +
                    " leaves no room for sigma_u2 (sigma_T2 = " +
                    std::to_string(v.total) + ")");
  }
  return v;
}

void validate(const Scenario& s) {
  auto fail = [&](const std::string& why) {
    throw Error(ErrorCode::kInvalidConfig,
                "scenario '" + s.name + "': " + why);
  };
  if (s.mvn_cov.rows() != 3 || s.mvn_cov.cols() != 3) fail("covariance must be 3x3");
  if (!s.mvn_cov.all_finite()) fail("covariance has non-finite entries");
  try {
    (void)cholesky(s.mvn_cov);
  } catch (const Error& e) {
    fail(std::string("covariance is not symmetric positive definite (") +
         e.what() + ")");
  }
  if (!(s.r2_target > 0.0 && s.r2_target < 1.0)) fail("r2_target must lie in (0,1)");
  if (!(s.sigma_eps2 >= 0.0)) fail("sigma_eps2 must be >= 0");
  if (!(s.censor_time > 0.0)) fail("censor_time must be > 0");
  if (!(s.lambda0 > 0.0) || !std::isfinite(s.lambda0)) fail("lambda0 must be > 0");
  if (s.n_cohort < 1) fail("n_cohort must be >= 1");
  if (s.n_substudy > s.n_cohort) fail("n_substudy exceeds n_cohort");
  if (s.n_reliability > s.n_substudy) fail("n_reliability exceeds n_substudy");
  for (double a : s.alpha)
    if (!std::isfinite(a)) fail("alpha must be finite");
  for (double b : s.beta)
    if (!std::isfinite(b)) fail("beta must be finite");
  const double signal = calibration_signal_variance(s.alpha, s.mvn_cov);
  const double total = signal * (1.0 - s.r2_target) / s.r2_target;
  if (!(s.sigma_eps2 < total)) {
    fail("sigma_eps2 = " + std::to_string(s.sigma_eps2) +
         " is not below the implied sigma_T2 = " + std::to_string(total));
  }
}

double exposure_mean(const Scenario& s) {
  return linear_predictor(s, s.mvn_mean[0], s.mvn_mean[1], s.mvn_mean[2]);
}

double hazard_rate(double x_true, double age, double bmi, const Scenario& s) {
  const double eta = s.beta[0] * (x_true - exposure_mean(s)) +
                     s.beta[1] * (age - s.age_center) +
                     s.beta[2] * (bmi - s.bmi_center);
  return s.lambda0 * std::exp(eta);
}

SurvivalOutcome simulate_survival(double x_true, double age, double bmi,
                                  const Scenario& s, RngStream& stream) {
  const double rate = hazard_rate(x_true, age, bmi, s);
  if (!(rate > 0.0) || !std::isfinite(rate)) {
    throw Error(ErrorCode::kNonPositiveRate,
                "hazard rate " + std::to_string(rate));
  }
  const double t = stream.exponential() / rate;
  if (t <= s.censor_time) return {t, true};
  return {s.censor_time, false};
}

std::size_t Cohort::substudy_size() const {
  return static_cast<std::size_t>(std::count_if(
      rows.begin(), rows.end(), [](const CohortRow& r) { return r.in_substudy; }));
}

std::size_t Cohort::reliability_size() const {
  return static_cast<std::size_t>(
      std::count_if(rows.begin(), rows.end(),
                    [](const CohortRow& r) { return r.in_reliability; }));
}

double Cohort::censoring_fraction() const {
  if (rows.empty()) return 0.0;
  const auto censored = std::count_if(rows.begin(), rows.end(),
                                      [](const CohortRow& r) { return !r.event; });
  return static_cast<double>(censored) / static_cast<double>(rows.size());
}

Cohort generate_cohort(const Scenario& scenario, RngStream& stream) {
  const ErrorVariances ev = implied_error_variances(scenario);
  const double sd_u = std::sqrt(ev.u);
  const double sd_eps = std::sqrt(scenario.sigma_eps2);
  const Matrix l = cholesky(scenario.mvn_cov);
  const Matrix draws =
      sample_mvn(scenario.mvn_mean, l, scenario.n_cohort, stream);

  Cohort cohort;
  cohort.rows.resize(scenario.n_cohort);
  for (std::size_t i = 0; i < scenario.n_cohort; ++i) {
    CohortRow& r = cohort.rows[i];
    r.id = i + 1;
    r.x_star = draws(i, 0);
    r.age = draws(i, 1);
    r.bmi = draws(i, 2);
    r.x_true = linear_predictor(scenario, r.x_star, r.age, r.bmi) +
               sd_u * stream.normal();
    r.in_substudy = i < scenario.n_substudy;
    r.in_reliability = i < scenario.n_reliability;
    if (r.in_substudy) r.x_biomarker = r.x_true + sd_eps * stream.normal();
    if (r.in_reliability) {
      r.x_biomarker_repeat = r.x_true + sd_eps * stream.normal();
    }
    const SurvivalOutcome out =
        simulate_survival(r.x_true, r.age, r.bmi, scenario, stream);
    r.event_time = out.event_time;
    r.event = out.event;
  }
  return cohort;
}

Lambda0Calibration calibrate_lambda0(Scenario& scenario,
                                     double target_censoring,
                                     RngStream& stream,
                                     std::size_t calibration_rows) {
  if (!(target_censoring > 0.0 && target_censoring < 1.0)) {
    throw Error(ErrorCode::kInvalidConfig,
                "target censoring must lie in (0,1)");
  }
  const double n = static_cast<double>(calibration_rows);
  if (n * target_censoring < 10.0 || n * (1.0 - target_censoring) < 10.0) {
    throw Error(ErrorCode::kNoBracket,
                "target censoring " + std::to_string(target_censoring) +
                    " is not resolvable with " +
                    std::to_string(calibration_rows) + " calibration rows");
  }

  // Subject i has an event iff E_i / (lambda0 * exp(eta_i)) <= C, i.e.
  // iff threshold_i = E_i exp(-eta_i) / C <= lambda0.
  Scenario unit = scenario;
  unit.lambda0 = 1.0;
  const ErrorVariances ev = implied_error_variances(scenario);
  const double sd_u = std::sqrt(ev.u);
  const Matrix l = cholesky(scenario.mvn_cov);
  const Matrix draws = sample_mvn(scenario.mvn_mean, l, calibration_rows, stream);
  std::vector<double> thresholds(calibration_rows);
  for (std::size_t i = 0; i < calibration_rows; ++i) {
    const double x = linear_predictor(scenario, draws(i, 0), draws(i, 1),
                                      draws(i, 2)) +
                     sd_u * stream.normal();
    const double rate = hazard_rate(x, draws(i, 1), draws(i, 2), unit);
    thresholds[i] = stream.exponential() / (rate * scenario.censor_time);
  }
  std::sort(thresholds.begin(), thresholds.end());
  auto censoring_at = [&](double lambda0) {
    const auto events =
        std::upper_bound(thresholds.begin(), thresholds.end(), lambda0) -
        thresholds.begin();
    return 1.0 - static_cast<double>(events) / n;
  };

  double lo = std::log(1e-12);  // high censoring
  double hi = std::log(1e12);   // low censoring
  if (censoring_at(std::exp(lo)) < target_censoring ||
      censoring_at(std::exp(hi)) > target_censoring) {
    throw Error(ErrorCode::kNoBracket,
                "censoring target not bracketed by lambda0 in [1e-12, 1e12]");
  }
  for (int iter = 0; iter < 200 && hi - lo > 1e-13; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (censoring_at(std::exp(mid)) >= target_censoring) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const double lambda0 = std::exp(0.5 * (lo + hi));
  const double achieved = censoring_at(lambda0);
  if (std::abs(achieved - target_censoring) > 0.005) {
    throw Error(ErrorCode::kNoBracket,
                "bisection ended at censoring " + std::to_string(achieved));
  }
  scenario.lambda0 = lambda0;
  return {lambda0, achieved, calibration_rows};
}

}  // namespace regcal
