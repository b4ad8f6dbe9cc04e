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

// The six exposure-analysis strategies compared in the simulation study,
// the two-stage stratified bootstrap and the inverse-variance combination
// of the two calibrated estimators.

#ifndef REGCAL_ESTIMATORS_H_
#define REGCAL_ESTIMATORS_H_

#include <array>
#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "regcal/datagen.h"
#include "regcal/matrix.h"
#include "regcal/rng.h"
#include "regcal/survival.h"

namespace regcal {

enum class Strategy {
  kTruth,
  kNaiveBiomarker,
  kCalibratedBiomarker,
  kNaiveSelfReport,
  kCalibratedSelfReport,
  kOptimal,
};

inline constexpr std::array<Strategy, 6> kAllStrategies = {
    Strategy::kTruth,           Strategy::kNaiveBiomarker,
    Strategy::kCalibratedBiomarker, Strategy::kNaiveSelfReport,
    Strategy::kCalibratedSelfReport, Strategy::kOptimal};

std::string_view to_string(Strategy s);
std::optional<Strategy> parse_strategy(std::string_view name);
bool uses_full_cohort(Strategy s);
bool is_calibrated(Strategy s);

enum class CiKind { kWald, kPercentile };
std::string_view to_string(CiKind k);

struct EstimateRecord {
  Strategy strategy = Strategy::kTruth;
  double beta1_hat = 0.0;
  double se = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  CiKind ci_kind = CiKind::kWald;
  std::size_t n_analysis = 0;
  bool converged = true;
  std::string failure;  // empty on success
};

// X** ~ X* + (age - c_age) + (BMI - c_bmi) over the sub-study.
struct SelfReportCalibration {
  std::array<double, 4> coefficients{};
  double age_center = 46.1;
  double bmi_center = 29.6;

  double predict(double x_star, double age, double bmi) const {
    return coefficients[0] + coefficients[1] * x_star +
           coefficients[2] * (age - age_center) +
           coefficients[3] * (bmi - bmi_center);
  }
};

// E[X | X**, W] under joint normality: m(W) from X** ~ (age, BMI) on the
// sub-study, shrinkage k = (s2_resid - sigma_eps2) / s2_resid in [0, 1],
// exposure = k X** + (1 - k) m(W).
struct BiomarkerCalibration {
  std::array<double, 3> coefficients{};
  double age_center = 46.1;
  double bmi_center = 29.6;
  double residual_variance = 0.0;
  double sigma_eps2 = 0.0;
  double shrinkage = 1.0;

  double conditional_mean(double age, double bmi) const {
    return coefficients[0] + coefficients[1] * (age - age_center) +
           coefficients[2] * (bmi - bmi_center);
  }
  double predict(double x_biomarker, double age, double bmi) const {
    return shrinkage * x_biomarker +
           (1.0 - shrinkage) * conditional_mean(age, bmi);
  }
};

struct CalibrationModels {
  std::optional<SelfReportCalibration> self_report;
  std::optional<BiomarkerCalibration> biomarker;
};

enum class CombineMode { kJointCovariance, kIndependent };

struct EstimatorSettings {
  double age_center = 46.1;
  double bmi_center = 29.6;
  std::size_t n_boot = 200;
  CombineMode combine = CombineMode::kJointCovariance;
  double max_failed_fraction = 0.05;
  CoxOptions cox;
};

/// Within-person error variance from duplicate biomarker pairs,
/// sum(d_i^2) / (2 m).
double replicate_error_variance(std::span<const double> first,
                                std::span<const double> second);

SelfReportCalibration fit_self_report_calibration(const Cohort& cohort,
                                                  const EstimatorSettings& s);
BiomarkerCalibration fit_biomarker_calibration(const Cohort& cohort,
                                               const EstimatorSettings& s);
CalibrationModels fit_calibration_models(const Cohort& cohort,
                                         const EstimatorSettings& s);

struct ExposureSeries {
  std::vector<double> exposure;
  std::vector<std::size_t> rows;  // cohort row indices, same order
};

/// Exposure each strategy feeds to the outcome model and the rows it is
/// fitted on. Throws kMissingFit when a calibrated strategy lacks its
/// model and kEmptyAnalysisSet when no row qualifies.
ExposureSeries exposure_series(Strategy strategy, const Cohort& cohort,
                               const CalibrationModels& fits);

/// Cox data with covariates (exposure, age - c_age, BMI - c_bmi).
SurvData outcome_data(const Cohort& cohort, const ExposureSeries& series,
                      const EstimatorSettings& s);

// Resampling weights: for every stratum, as many draws with replacement as
// the stratum has members. Rows outside every stratum get weight 0.
std::vector<double> stratified_resample_weights(
    std::span<const std::vector<std::size_t>> strata, std::size_t n_rows,
    RngStream& stream);

struct BootstrapSummary {
  std::vector<double> replicates;  // NaN marks a failed replicate
  std::size_t failed = 0;
  double se = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
};

/// SD (n - 1) and 2.5 / 97.5 percentiles of the finite replicates.
BootstrapSummary summarize_replicates(std::vector<double> replicates);

// Returns one value per tracked statistic; NaN means that statistic failed
// on this resample.
using WeightedStatistic =
    std::function<std::vector<double>(std::span<const double> weights)>;

/// Replicate b uses stream.child(b), so results do not depend on the
/// order replicates are evaluated in.
std::vector<BootstrapSummary> stratified_bootstrap(
    std::span<const std::vector<std::size_t>> strata, std::size_t n_rows,
    std::size_t replicates, RngStream& stream,
    const WeightedStatistic& statistic, std::size_t num_statistics);

struct BootstrapInference {
  std::vector<Strategy> strategies;
  std::vector<BootstrapSummary> summaries;  // parallel to strategies
  // Covariance of the (first, second) replicate pairs when two strategies
  // were requested, over replicates where both succeeded.
  std::optional<Matrix> covariance;
};

/// Two-stage bootstrap: sub-study members and the rest are resampled
/// separately, the calibration models are refitted inside every replicate
/// and each requested calibrated strategy is re-estimated. Throws
/// kTooManyFailedReplicates when more than max_failed_fraction of B fail.
BootstrapInference bootstrap_inference(std::span<const Strategy> strategies,
                                       const Cohort& cohort,
                                       const EstimatorSettings& s,
                                       RngStream& stream);

/// One strategy other than kOptimal. Fit failures come back as a record
/// with converged = false rather than an exception.
EstimateRecord estimate(Strategy strategy, const Cohort& cohort,
                        const EstimatorSettings& s, RngStream& stream);

/// Generalised inverse-variance weighted mean of the calibrated biomarker
/// and calibrated self-report estimates with a Wald interval. Throws
/// kSingularCovariance unless `covariance` is SPD.
EstimateRecord optimal_combine(const EstimateRecord& calibrated_biomarker,
                               const EstimateRecord& calibrated_self_report,
                               const Matrix& covariance);

/// Every requested strategy on one cohort, sharing a single bootstrap for
/// the calibrated strategies and the optimal combination. Records come
/// back in the order requested.
std::vector<EstimateRecord> estimate_strategies(
    std::span<const Strategy> strategies, const Cohort& cohort,
    const EstimatorSettings& s, RngStream& stream);

}  // namespace regcal

#endif  // REGCAL_ESTIMATORS_H_
