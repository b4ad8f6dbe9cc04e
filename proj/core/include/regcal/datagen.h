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

#ifndef REGCAL_DATAGEN_H_
#define REGCAL_DATAGEN_H_

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "regcal/matrix.h"
#include "regcal/rng.h"

namespace regcal {

// Which reference value of the exposure log hazard ratio a built-in
// scenario carries. kGenerating is the value the reference cohorts were
// simulated with (it reproduces the reference power and coverage);
// kNominal is the headline hazard ratio quoted with those results.
enum class Beta1Source { kGenerating, kNominal };

// Complete data-generating configuration for one nutrient.
//
// Coordinates of mvn_mean / mvn_cov are (log self-report X*, age, BMI).
// The true exposure is
//   X = alpha[0] + alpha[1] X* + alpha[2] (age - age_center)
//       + alpha[3] (BMI - bmi_center) + u,
// the biomarker is X** = X + eps, and event times are exponential with
// rate lambda0 * exp(beta . (X - mean X, age - age_center, BMI - bmi_center)).
struct Scenario {
  std::string name;
  std::size_t n_cohort = 16415;
  std::size_t n_substudy = 476;
  std::size_t n_reliability = 95;
  std::array<double, 3> mvn_mean{};
  Matrix mvn_cov = Matrix(3, 3);
  std::array<double, 4> alpha{};
  double r2_target = 0.5;
  double sigma_eps2 = 0.0;
  std::array<double, 3> beta{};
  double lambda0 = 1.0;
  double censor_time = 60.0;
  double age_center = 46.1;
  double bmi_center = 29.6;
};

std::vector<std::string> builtin_scenario_names();

/// Built-in scenario by name (beta_cryptoxanthin, lycopene, folate).
/// Throws kUnknownScenario for anything else.
Scenario build_scenario(std::string_view name,
                        Beta1Source beta1 = Beta1Source::kGenerating);

/// Reference exposure log hazard ratio for a built-in scenario.
double reference_beta1(std::string_view name, Beta1Source source);

/// Throws kInvalidConfig when any Scenario invariant is violated.
void validate(const Scenario& scenario);

struct ErrorVariances {
  // Variance of the calibration linear predictor (the "A" term).
  double signal = 0.0;
  // Residual variance of the X** prediction model, sigma_u^2 + sigma_eps^2.
  double total = 0.0;
  // Variance of the true-exposure equation error.
  double u = 0.0;
};

/// Quadratic form alpha_{1:3}^T Sigma alpha_{1:3}.
double calibration_signal_variance(const std::array<double, 4>& alpha,
                                   const Matrix& cov);

/// Throws kNegativeErrorVariance when sigma_u^2 <= 0.
ErrorVariances implied_error_variances(const Scenario& scenario);

/// Population mean of the true exposure X.
double exposure_mean(const Scenario& scenario);

struct CohortRow {
  std::size_t id = 0;
  double x_star = 0.0;
  double age = 0.0;
  double bmi = 0.0;
  double x_true = 0.0;
  std::optional<double> x_biomarker;
  std::optional<double> x_biomarker_repeat;
  double event_time = 0.0;
  bool event = false;
  bool in_substudy = false;
  bool in_reliability = false;
};

struct Cohort {
  std::vector<CohortRow> rows;

  std::size_t substudy_size() const;
  std::size_t reliability_size() const;
  double censoring_fraction() const;
};

/// One cohort per the scenario. The first n_substudy rows are the
/// sub-study; the first n_reliability of those carry a repeat biomarker.
Cohort generate_cohort(const Scenario& scenario, RngStream& stream);

struct SurvivalOutcome {
  double event_time = 0.0;
  bool event = false;
};

double hazard_rate(double x_true, double age, double bmi,
                   const Scenario& scenario);

SurvivalOutcome simulate_survival(double x_true, double age, double bmi,
                                  const Scenario& scenario, RngStream& stream);

struct Lambda0Calibration {
  double lambda0 = 0.0;
  double achieved_censoring = 0.0;
  std::size_t calibration_rows = 0;
};

/// Bisection on log(lambda0) over [1e-12, 1e12] against a calibration
/// cohort of `calibration_rows` subjects (covariates and unit exponentials
/// drawn once, so the censoring fraction is monotone in lambda0). Stores
/// the result into scenario.lambda0.
///
/// Throws kNoBracket when the target is outside what the calibration
/// cohort can resolve (fewer than 10 expected events or censorings) or
/// when the achieved fraction misses the target by more than 0.005.
Lambda0Calibration calibrate_lambda0(Scenario& scenario,
                                     double target_censoring,
                                     RngStream& stream,
                                     std::size_t calibration_rows = 200000);

}  // namespace regcal

#endif  // REGCAL_DATAGEN_H_
