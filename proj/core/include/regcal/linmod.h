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

// Linear prediction (calibration) models for log biomarker levels and the
// R^2 summaries built on them.

#ifndef REGCAL_LINMOD_H_
#define REGCAL_LINMOD_H_

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "regcal/matrix.h"
#include "regcal/rng.h"
#include "regcal/table.h"

namespace regcal {

inline constexpr const char* kInterceptName = "(Intercept)";

struct Design {
  std::string response;
  std::vector<std::string> terms;
  // Value subtracted from a term before fitting (e.g. age at 46.1).
  std::map<std::string, double> centers;
  // Refuse to fit when more than this fraction of the response is missing.
  double max_response_missing = 0.40;
};

struct CalibrationFit {
  Design design;
  std::vector<std::string> term_names;  // intercept first
  std::vector<double> coefficients;
  std::vector<double> se;
  double residual_variance = 0.0;  // RSS / (n - p)
  double rss = 0.0;
  double tss = 0.0;
  std::size_t n_used = 0;
  std::size_t n_dropped = 0;
  double r2 = 0.0;

  std::size_t num_coefficients() const { return coefficients.size(); }
  std::optional<double> coefficient(const std::string& term) const;
};

// Complete-case design matrix (intercept column first, centred terms).
struct ModelFrame {
  Matrix x;
  std::vector<double> y;
  std::vector<std::size_t> rows;  // source row of each model row
  std::size_t n_dropped = 0;
};

ModelFrame build_model_frame(const Table& data, const Design& design);

/// OLS of design.response on design.terms over complete cases.
/// Throws kTooFewRows (< terms + 2 complete rows), kExcessMissingness and
/// kRankDeficient.
CalibrationFit fit_calibration(const Table& data, const Design& design);
CalibrationFit fit_frame(const ModelFrame& frame, const Design& design);

/// Predictions for every row of `data`; NaN where a term is missing.
std::vector<double> predict(const CalibrationFit& fit, const Table& data);

/// R^2 attainable with j averaged replicates: r2 / (icc + (1 - icc) / j).
double r2_with_replicates(double r2, double icc, double j);

struct R2Family {
  double r2 = 0.0;
  double prentice_r2 = 0.0;
  double icc_used = 1.0;
  std::map<std::string, double> partial_r2;
  std::map<int, double> r2_new;
};

/// Throws kInvalidIcc unless 0 < icc <= 1.
R2Family r2_family(double r2, double icc, std::span<const int> replicates);
R2Family r2_family(const CalibrationFit& fit, double icc,
                   std::span<const int> replicates);

/// As above plus the partial R^2 of every term (each dropped in turn,
/// refitted on the same complete-case rows).
R2Family r2_family(const Table& data, const Design& design, double icc,
                   std::span<const int> replicates);

/// (RSS_reduced - RSS_full) / RSS_reduced. Throws kNotNested when the
/// reduced model fits better than the full one or uses different rows.
double partial_r2(const CalibrationFit& full, const CalibrationFit& reduced);

// A reported R^2 summary: replicates = nullopt means Prentice R^2.
struct ReportedR2 {
  std::optional<int> replicates;
  double value = 0.0;
};

struct IccBacksolve {
  double icc = 0.0;
  double max_abs_error = 0.0;
};

/// ICC in (0, 1] minimising the largest absolute deviation between the
/// implied and the reported summaries of one model.
IccBacksolve backsolve_icc(double r2, std::span<const ReportedR2> reported);

/// n ln(RSS / n) + 2 (p + 1), p counting the intercept.
double gaussian_aic(std::size_t n, double rss, std::size_t num_coefficients);

struct StepRecord {
  enum class Action { kDrop, kAdd } action;
  std::string term;
  double aic = 0.0;
};

struct StepwiseResult {
  CalibrationFit full;
  double full_aic = 0.0;
  CalibrationFit selected;
  double selected_aic = 0.0;
  std::vector<StepRecord> steps;
};

/// Bidirectional stepwise search starting from the full model. Each step
/// takes the single drop or add with the lowest AIC (ties broken by term
/// name) and stops when nothing lowers AIC. All candidate models share the
/// full model's complete-case rows.
StepwiseResult stepwise_aic(const Table& data, const Design& full_design);

struct OptimismResult {
  double apparent_r2 = 0.0;
  double mean_optimism = 0.0;
  double corrected_r2 = 0.0;
  std::size_t replicates_used = 0;
  std::size_t replicates_skipped = 0;
};

/// Bootstrap optimism: each replicate fits on a resample and records
/// R^2(resample) - R^2(resample model on the original rows).
OptimismResult optimism_corrected_r2(const Table& data, const Design& design,
                                     std::size_t replicates, RngStream& stream);

/// Same, with caller-supplied resamples (row indices into the frame).
/// Rank-deficient resamples are skipped; throws kDegenerateResample if all
/// are.
OptimismResult optimism_from_resamples(
    const ModelFrame& frame,
    std::span<const std::vector<std::size_t>> resamples);

}  // namespace regcal

#endif  // REGCAL_LINMOD_H_
