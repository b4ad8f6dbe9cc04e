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

#include "regcal/estimators.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "regcal/error.h"
#include "regcal/numerics.h"

namespace regcal {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kZ975 = 1.959963984540054;

struct WeightedFit {
  std::vector<double> coefficients;
  double rss = 0.0;
  double weight_total = 0.0;
};

// Frequency-weighted least squares over the listed rows; rows with zero
// weight are skipped. `fill` writes the p design values of one row.
template <typename Fill>
WeightedFit weighted_least_squares(std::span<const std::size_t> rows,
                                   std::span<const double> weights,
                                   std::span<const double> response,
                                   std::size_t p, Fill fill) {
  std::vector<double> values;
  std::vector<double> y;
  values.reserve(rows.size() * p);
  y.reserve(rows.size());
  double total = 0.0;
  std::vector<double> buf(p);
  for (std::size_t i : rows) {
    const double w = weights.empty() ? 1.0 : weights[i];
    if (w == 0.0) continue;
    const double root = std::sqrt(w);
    fill(i, buf);
    for (double v : buf) values.push_back(root * v);
    y.push_back(root * response[i]);
    total += w;
  }
  const std::size_t m = y.size();
  if (m <= p) {
    throw Error(ErrorCode::kTooFewRows, "calibration fit has too few rows");
  }
  const Matrix x = Matrix::from_row_major(m, p, std::move(values));
  const LeastSquaresResult ls = solve_least_squares(x, y);
  return {ls.coefficients, ls.rss, total};
}

// Column-oriented copy of the cohort used by the estimation hot paths.
struct PreparedCohort {
  std::size_t n = 0;
  std::vector<double> x_star, age, bmi, x_true, x_bm, x_bm_repeat, times;
  std::vector<std::uint8_t> events;
  std::vector<std::size_t> substudy;
  std::vector<std::size_t> non_substudy;
  std::vector<std::size_t> reliability;

  explicit PreparedCohort(const Cohort& cohort) : n(cohort.rows.size()) {
    x_star.resize(n);
    age.resize(n);
    bmi.resize(n);
    x_true.resize(n);
    x_bm.assign(n, kNaN);
    x_bm_repeat.assign(n, kNaN);
    times.resize(n);
    events.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      const CohortRow& r = cohort.rows[i];
      x_star[i] = r.x_star;
      age[i] = r.age;
      bmi[i] = r.bmi;
      x_true[i] = r.x_true;
      times[i] = r.event_time;
      events[i] = r.event ? 1 : 0;
      if (r.in_substudy && r.x_biomarker) {
        x_bm[i] = *r.x_biomarker;
        substudy.push_back(i);
        if (r.in_reliability && r.x_biomarker_repeat) {
          x_bm_repeat[i] = *r.x_biomarker_repeat;
          reliability.push_back(i);
        }
      } else {
        non_substudy.push_back(i);
      }
    }
  }
};

SelfReportCalibration fit_self_report(const PreparedCohort& pc,
                                      std::span<const double> weights,
                                      const EstimatorSettings& s) {
  const WeightedFit fit = weighted_least_squares(
      pc.substudy, weights, pc.x_bm, 4, [&](std::size_t i, std::span<double> row) {
        row[0] = 1.0;
        row[1] = pc.x_star[i];
        row[2] = pc.age[i] - s.age_center;
        row[3] = pc.bmi[i] - s.bmi_center;
      });
  SelfReportCalibration cal;
  std::copy(fit.coefficients.begin(), fit.coefficients.end(),
            cal.coefficients.begin());
  cal.age_center = s.age_center;
  cal.bmi_center = s.bmi_center;
  return cal;
}

BiomarkerCalibration fit_biomarker(const PreparedCohort& pc,
                                   std::span<const double> weights,
                                   const EstimatorSettings& s) {
  const WeightedFit fit = weighted_least_squares(
      pc.substudy, weights, pc.x_bm, 3, [&](std::size_t i, std::span<double> row) {
        row[0] = 1.0;
        row[1] = pc.age[i] - s.age_center;
        row[2] = pc.bmi[i] - s.bmi_center;
      });
  double d2 = 0.0;
  double m = 0.0;
  for (std::size_t i : pc.reliability) {
    const double w = weights.empty() ? 1.0 : weights[i];
    const double d = pc.x_bm[i] - pc.x_bm_repeat[i];
    d2 += w * d * d;
    m += w;
  }
  if (!(m > 0.0)) {
    throw Error(ErrorCode::kMissingFit,
                "no reliability pairs to estimate the biomarker error variance");
  }
  BiomarkerCalibration cal;
  std::copy(fit.coefficients.begin(), fit.coefficients.end(),
            cal.coefficients.begin());
  cal.age_center = s.age_center;
  cal.bmi_center = s.bmi_center;
  cal.residual_variance = fit.rss / (fit.weight_total - 3.0);
  cal.sigma_eps2 = d2 / (2.0 * m);
  cal.shrinkage =
      cal.residual_variance > 0.0
          ? std::clamp((cal.residual_variance - cal.sigma_eps2) /
                           cal.residual_variance,
                       0.0, 1.0)
          : 0.0;
  return cal;
}

double exposure_value(Strategy strategy, const PreparedCohort& pc, std::size_t i,
                      const CalibrationModels& fits) {
  switch (strategy) {
    case Strategy::kTruth: return pc.x_true[i];
    case Strategy::kNaiveBiomarker: return pc.x_bm[i];
    case Strategy::kCalibratedBiomarker:
      return fits.biomarker->predict(pc.x_bm[i], pc.age[i], pc.bmi[i]);
    case Strategy::kNaiveSelfReport: return pc.x_star[i];
    case Strategy::kCalibratedSelfReport:
      return fits.self_report->predict(pc.x_star[i], pc.age[i], pc.bmi[i]);
    case Strategy::kOptimal: break;
  }
  throw Error(ErrorCode::kInvalidConfig,
              "the optimal combination has no exposure series");
}

void require_fits(Strategy strategy, const CalibrationModels& fits) {
  if (strategy == Strategy::kCalibratedBiomarker && !fits.biomarker) {
    throw Error(ErrorCode::kMissingFit, "calibrated biomarker needs its model");
  }
  if (strategy == Strategy::kCalibratedSelfReport && !fits.self_report) {
    throw Error(ErrorCode::kMissingFit,
                "calibrated self-report needs its model");
  }
}

// Cox data over a fixed row subset whose exposure column is rewritten per
// bootstrap replicate; the risk-set order depends only on the times.
struct OutcomeProblem {
  std::vector<std::size_t> rows;
  SurvData data;
  RiskSetOrder order;

  OutcomeProblem(const PreparedCohort& pc, std::vector<std::size_t> subset,
                 const EstimatorSettings& s)
      : rows(std::move(subset)), data(make_data(pc, rows, s)), order(data.times) {}

  static SurvData make_data(const PreparedCohort& pc,
                            const std::vector<std::size_t>& rows,
                            const EstimatorSettings& s) {
    SurvData d;
    d.times.reserve(rows.size());
    d.events.reserve(rows.size());
    d.covariates = Matrix(rows.size(), 3);
    for (std::size_t k = 0; k < rows.size(); ++k) {
      const std::size_t i = rows[k];
      d.times.push_back(pc.times[i]);
      d.events.push_back(pc.events[i]);
      d.covariates(k, 1) = pc.age[i] - s.age_center;
      d.covariates(k, 2) = pc.bmi[i] - s.bmi_center;
    }
    return d;
  }

  void set_exposure(Strategy strategy, const PreparedCohort& pc,
                    const CalibrationModels& fits) {
    for (std::size_t k = 0; k < rows.size(); ++k) {
      data.covariates(k, 0) = exposure_value(strategy, pc, rows[k], fits);
    }
  }

  void set_weights(std::span<const double> cohort_weights) {
    data.weights.resize(rows.size());
    for (std::size_t k = 0; k < rows.size(); ++k) {
      data.weights[k] = cohort_weights[rows[k]];
    }
  }
};

std::vector<std::size_t> analysis_rows(Strategy strategy, const PreparedCohort& pc) {
  if (uses_full_cohort(strategy)) {
    std::vector<std::size_t> all(pc.n);
    for (std::size_t i = 0; i < pc.n; ++i) all[i] = i;
    return all;
  }
  return pc.substudy;
}

EstimateRecord failed_record(Strategy strategy, std::size_t n, std::string why) {
  EstimateRecord r;
  r.strategy = strategy;
  r.beta1_hat = kNaN;
  r.se = kNaN;
  r.ci_low = kNaN;
  r.ci_high = kNaN;
  r.ci_kind = is_calibrated(strategy) ? CiKind::kPercentile : CiKind::kWald;
  r.n_analysis = n;
  r.converged = false;
  r.failure = std::move(why);
  return r;
}

EstimateRecord wald_record(Strategy strategy, std::size_t n, double beta,
                           double se) {
  EstimateRecord r;
  r.strategy = strategy;
  r.beta1_hat = beta;
  r.se = se;
  r.ci_low = beta - kZ975 * se;
  r.ci_high = beta + kZ975 * se;
  r.ci_kind = CiKind::kWald;
  r.n_analysis = n;
  return r;
}

// Exposure coefficient of a Cox fit, NaN when the fit fails.
double fit_exposure_coefficient(const OutcomeProblem& problem,
                                const CoxOptions& options) {
  try {
    const CoxFit fit = fit_cox(problem.data, problem.order, options);
    return fit.converged ? fit.beta[0] : kNaN;
  } catch (const Error&) {
    return kNaN;
  }
}

struct CalibratedContext {
  const PreparedCohort& pc;
  const EstimatorSettings& settings;
  std::vector<Strategy> strategies;
  std::vector<OutcomeProblem> problems;
  std::vector<std::vector<double>> init;
};

BootstrapInference run_bootstrap(CalibratedContext& ctx, RngStream& stream) {
  const PreparedCohort& pc = ctx.pc;
  const std::vector<std::size_t> strata_storage[2] = {pc.substudy, pc.non_substudy};
  const bool needs_sr = std::find(ctx.strategies.begin(), ctx.strategies.end(),
                                  Strategy::kCalibratedSelfReport) !=
                        ctx.strategies.end();
  const bool needs_bm = std::find(ctx.strategies.begin(), ctx.strategies.end(),
                                  Strategy::kCalibratedBiomarker) !=
                        ctx.strategies.end();

  const WeightedStatistic statistic = [&](std::span<const double> w) {
    std::vector<double> out(ctx.strategies.size(), kNaN);
    CalibrationModels fits;
    try {
      if (needs_sr) fits.self_report = fit_self_report(pc, w, ctx.settings);
      if (needs_bm) fits.biomarker = fit_biomarker(pc, w, ctx.settings);
    } catch (const Error&) {
      return out;
    }
    for (std::size_t k = 0; k < ctx.strategies.size(); ++k) {
      OutcomeProblem& problem = ctx.problems[k];
      problem.set_exposure(ctx.strategies[k], pc, fits);
      problem.set_weights(w);
      CoxOptions options = ctx.settings.cox;
      options.init = ctx.init[k];
      out[k] = fit_exposure_coefficient(problem, options);
    }
    return out;
  };

  BootstrapInference inference;
  inference.strategies = ctx.strategies;
  inference.summaries =
      stratified_bootstrap(strata_storage, pc.n, ctx.settings.n_boot, stream,
                           statistic, ctx.strategies.size());
  for (std::size_t k = 0; k < inference.summaries.size(); ++k) {
    const auto& summary = inference.summaries[k];
    if (static_cast<double>(summary.failed) >
        ctx.settings.max_failed_fraction * static_cast<double>(ctx.settings.n_boot)) {
      throw Error(ErrorCode::kTooManyFailedReplicates,
                  std::string(to_string(ctx.strategies[k])) + ": " +
                      std::to_string(summary.failed) + " of " +
                      std::to_string(ctx.settings.n_boot) +
                      " bootstrap fits failed");
    }
  }
  if (inference.summaries.size() == 2) {
    const auto& a = inference.summaries[0].replicates;
    const auto& b = inference.summaries[1].replicates;
    std::vector<double> pa, pb;
    for (std::size_t r = 0; r < a.size(); ++r) {
      if (std::isfinite(a[r]) && std::isfinite(b[r])) {
        pa.push_back(a[r]);
        pb.push_back(b[r]);
      }
    }
    if (pa.size() >= 2) {
      Matrix cov(2, 2);
      cov(0, 0) = variance(pa);
      cov(1, 1) = variance(pb);
      cov(0, 1) = cov(1, 0) = covariance(pa, pb);
      inference.covariance = cov;
    }
  }
  return inference;
}

}  // namespace

std::string_view to_string(Strategy s) {
  switch (s) {
    case Strategy::kTruth: return "TRUTH";
    case Strategy::kNaiveBiomarker: return "NAIVE_BIOMARKER";
    case Strategy::kCalibratedBiomarker: return "CALIBRATED_BIOMARKER";
    case Strategy::kNaiveSelfReport: return "NAIVE_SELFREPORT";
    case Strategy::kCalibratedSelfReport: return "CALIBRATED_SELFREPORT";
    case Strategy::kOptimal: return "OPTIMAL";
  }
  return "UNKNOWN";
}

std::optional<Strategy> parse_strategy(std::string_view name) {
  for (Strategy s : kAllStrategies)
    if (to_string(s) == name) return s;
  return std::nullopt;
}

bool uses_full_cohort(Strategy s) {
  return s == Strategy::kTruth || s == Strategy::kNaiveSelfReport ||
         s == Strategy::kCalibratedSelfReport || s == Strategy::kOptimal;
}

bool is_calibrated(Strategy s) {
  return s == Strategy::kCalibratedBiomarker ||
         s == Strategy::kCalibratedSelfReport;
}

std::string_view to_string(CiKind k) {
  return k == CiKind::kWald ? "wald" : "percentile";
}

double replicate_error_variance(std::span<const double> first,
                                std::span<const double> second) {
  if (first.size() != second.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "replicate lengths differ");
  }
  if (first.empty()) throw Error(ErrorCode::kEmptyInput, "no replicate pairs");
  double s = 0.0;
  for (std::size_t i = 0; i < first.size(); ++i) {
    const double d = first[i] - second[i];
    s += d * d;
  }
  return s / (2.0 * static_cast<double>(first.size()));
}

SelfReportCalibration fit_self_report_calibration(const Cohort& cohort,
                                                  const EstimatorSettings& s) {
  return fit_self_report(PreparedCohort(cohort), {}, s);
}

BiomarkerCalibration fit_biomarker_calibration(const Cohort& cohort,
                                               const EstimatorSettings& s) {
  return fit_biomarker(PreparedCohort(cohort), {}, s);
}

CalibrationModels fit_calibration_models(const Cohort& cohort,
                                         const EstimatorSettings& s) {
  const PreparedCohort pc(cohort);
  return {fit_self_report(pc, {}, s), fit_biomarker(pc, {}, s)};
}

ExposureSeries exposure_series(Strategy strategy, const Cohort& cohort,
                               const CalibrationModels& fits) {
  require_fits(strategy, fits);
  const PreparedCohort pc(cohort);
  ExposureSeries series;
  series.rows = analysis_rows(strategy, pc);
  if (series.rows.empty()) {
    throw Error(ErrorCode::kEmptyAnalysisSet,
                std::string(to_string(strategy)) + " has no analysis rows");
  }
  series.exposure.reserve(series.rows.size());
  for (std::size_t i : series.rows) {
    series.exposure.push_back(exposure_value(strategy, pc, i, fits));
  }
  return series;
}

SurvData outcome_data(const Cohort& cohort, const ExposureSeries& series,
                      const EstimatorSettings& s) {
  SurvData d;
  d.covariates = Matrix(series.rows.size(), 3);
  for (std::size_t k = 0; k < series.rows.size(); ++k) {
    const CohortRow& r = cohort.rows.at(series.rows[k]);
    d.times.push_back(r.event_time);
    d.events.push_back(r.event ? 1 : 0);
    d.covariates(k, 0) = series.exposure[k];
    d.covariates(k, 1) = r.age - s.age_center;
    d.covariates(k, 2) = r.bmi - s.bmi_center;
  }
  return d;
}

std::vector<double> stratified_resample_weights(
    std::span<const std::vector<std::size_t>> strata, std::size_t n_rows,
    RngStream& stream) {
  std::vector<double> w(n_rows, 0.0);
  for (const auto& stratum : strata) {
    const std::size_t m = stratum.size();
    for (std::size_t k = 0; k < m; ++k) w[stratum[stream.uniform_index(m)]] += 1.0;
  }
  return w;
}

BootstrapSummary summarize_replicates(std::vector<double> replicates) {
  BootstrapSummary s;
  std::vector<double> ok;
  for (double v : replicates) {
    if (std::isfinite(v)) {
      ok.push_back(v);
    } else {
      ++s.failed;
    }
  }
  s.replicates = std::move(replicates);
  if (ok.empty()) {
    s.se = s.ci_low = s.ci_high = kNaN;
    return s;
  }
  s.se = ok.size() > 1 ? std::sqrt(variance(ok)) : 0.0;
  s.ci_low = empirical_quantile(ok, 0.025);
  s.ci_high = empirical_quantile(ok, 0.975);
  return s;
}

std::vector<BootstrapSummary> stratified_bootstrap(
    std::span<const std::vector<std::size_t>> strata, std::size_t n_rows,
    std::size_t replicates, RngStream& stream,
    const WeightedStatistic& statistic, std::size_t num_statistics) {
  std::vector<std::vector<double>> values(num_statistics,
                                          std::vector<double>(replicates, kNaN));
  for (std::size_t b = 0; b < replicates; ++b) {
    RngStream rs = stream.child(b);
    const std::vector<double> w = stratified_resample_weights(strata, n_rows, rs);
    const std::vector<double> stat = statistic(w);
    for (std::size_t k = 0; k < num_statistics && k < stat.size(); ++k) {
      values[k][b] = stat[k];
    }
  }
  std::vector<BootstrapSummary> out;
  out.reserve(num_statistics);
  for (auto& v : values) out.push_back(summarize_replicates(std::move(v)));
  return out;
}

BootstrapInference bootstrap_inference(std::span<const Strategy> strategies,
                                       const Cohort& cohort,
                                       const EstimatorSettings& s,
                                       RngStream& stream) {
  if (s.n_boot < 50) {
    throw Error(ErrorCode::kInvalidConfig, "bootstrap needs B >= 50");
  }
  if (strategies.empty() || strategies.size() > 2) {
    throw Error(ErrorCode::kInvalidConfig,
                "bootstrap takes one calibrated strategy or a pair");
  }
  for (Strategy st : strategies) {
    if (!is_calibrated(st)) {
      throw Error(ErrorCode::kInvalidConfig,
                  std::string(to_string(st)) + " is not a calibrated strategy");
    }
  }
  const PreparedCohort pc(cohort);
  const CalibrationModels fits{fit_self_report(pc, {}, s), fit_biomarker(pc, {}, s)};
  CalibratedContext ctx{pc, s, {strategies.begin(), strategies.end()}, {}, {}};
  for (Strategy st : strategies) {
    ctx.problems.emplace_back(pc, analysis_rows(st, pc), s);
    ctx.problems.back().set_exposure(st, pc, fits);
    std::vector<double> init(3, 0.0);
    try {
      init = fit_cox(ctx.problems.back().data, ctx.problems.back().order, s.cox).beta;
    } catch (const Error&) {
    }
    ctx.init.push_back(std::move(init));
  }
  return run_bootstrap(ctx, stream);
}

EstimateRecord optimal_combine(const EstimateRecord& calibrated_biomarker,
                               const EstimateRecord& calibrated_self_report,
                               const Matrix& covariance) {
  if (covariance.rows() != 2 || covariance.cols() != 2) {
    throw Error(ErrorCode::kDimensionMismatch, "combination needs a 2x2 covariance");
  }
  const double a = covariance(0, 0);
  const double b = covariance(0, 1);
  const double c = covariance(1, 0);
  const double d = covariance(1, 1);
  const double det = a * d - b * c;
  if (!(a > 0.0) || !(d > 0.0) || !(det > 0.0) ||
      std::abs(b - c) > 1e-12 * std::max(std::abs(a), std::abs(d)) ||
      !std::isfinite(det)) {
    throw Error(ErrorCode::kSingularCovariance,
                "bootstrap covariance is not positive definite");
  }
  // Sigma^-1 1 = (d - b, a - c) / det.
  const double w_cb = (d - b) / det;
  const double w_csr = (a - c) / det;
  const double precision = w_cb + w_csr;
  if (!(precision > 0.0)) {
    throw Error(ErrorCode::kSingularCovariance, "non-positive combined precision");
  }
  const double beta = (w_cb * calibrated_biomarker.beta1_hat +
                       w_csr * calibrated_self_report.beta1_hat) /
                      precision;
  EstimateRecord r = wald_record(Strategy::kOptimal,
                                 calibrated_self_report.n_analysis, beta,
                                 std::sqrt(1.0 / precision));
  return r;
}

std::vector<EstimateRecord> estimate_strategies(
    std::span<const Strategy> strategies, const Cohort& cohort,
    const EstimatorSettings& s, RngStream& stream) {
  const PreparedCohort pc(cohort);
  const bool want_optimal =
      std::find(strategies.begin(), strategies.end(), Strategy::kOptimal) !=
      strategies.end();

  std::vector<Strategy> calibrated;
  for (Strategy st : {Strategy::kCalibratedBiomarker, Strategy::kCalibratedSelfReport}) {
    const bool requested =
        std::find(strategies.begin(), strategies.end(), st) != strategies.end();
    if (requested || want_optimal) calibrated.push_back(st);
  }

  CalibrationModels fits;
  std::string fit_failure;
  if (!calibrated.empty()) {
    try {
      fits.self_report = fit_self_report(pc, {}, s);
      fits.biomarker = fit_biomarker(pc, {}, s);
    } catch (const Error& e) {
      fit_failure = e.what();
    }
  }

  std::vector<EstimateRecord> by_strategy(kAllStrategies.size());
  auto slot = [&](Strategy st) -> EstimateRecord& {
    return by_strategy[static_cast<std::size_t>(st)];
  };

  // Model-based strategies.
  for (Strategy st : strategies) {
    if (st == Strategy::kOptimal || is_calibrated(st)) continue;
    OutcomeProblem problem(pc, analysis_rows(st, pc), s);
    if (problem.rows.empty()) {
      slot(st) = failed_record(st, 0, "empty analysis set");
      continue;
    }
    problem.set_exposure(st, pc, fits);
    try {
      const CoxFit fit = fit_cox(problem.data, problem.order, s.cox);
      if (!fit.converged) {
        slot(st) = failed_record(st, problem.rows.size(), "Cox fit did not converge");
      } else {
        slot(st) = wald_record(st, problem.rows.size(), fit.beta[0], fit.se[0]);
      }
    } catch (const Error& e) {
      slot(st) = failed_record(st, problem.rows.size(), e.what());
    }
  }

  if (!calibrated.empty()) {
    CalibratedContext ctx{pc, s, {}, {}, {}};
    std::vector<double> point(calibrated.size(), kNaN);
    for (Strategy st : calibrated) {
      const std::size_t n_rows = uses_full_cohort(st) ? pc.n : pc.substudy.size();
      if (!fit_failure.empty()) {
        slot(st) = failed_record(st, n_rows, fit_failure);
        continue;
      }
      OutcomeProblem problem(pc, analysis_rows(st, pc), s);
      problem.set_exposure(st, pc, fits);
      try {
        const CoxFit fit = fit_cox(problem.data, problem.order, s.cox);
        if (!fit.converged) {
          slot(st) = failed_record(st, n_rows, "Cox fit did not converge");
          continue;
        }
        slot(st) = failed_record(st, n_rows, "");
        slot(st).beta1_hat = fit.beta[0];
        ctx.strategies.push_back(st);
        ctx.init.push_back(fit.beta);
        ctx.problems.push_back(std::move(problem));
      } catch (const Error& e) {
        slot(st) = failed_record(st, n_rows, e.what());
      }
    }

    std::optional<Matrix> joint;
    if (!ctx.strategies.empty()) {
      try {
        const BootstrapInference inf = run_bootstrap(ctx, stream);
        for (std::size_t k = 0; k < inf.strategies.size(); ++k) {
          EstimateRecord& r = slot(inf.strategies[k]);
          const BootstrapSummary& sum = inf.summaries[k];
          r.se = sum.se;
          r.ci_low = sum.ci_low;
          r.ci_high = sum.ci_high;
          r.ci_kind = CiKind::kPercentile;
          r.converged = true;
          r.failure.clear();
        }
        joint = inf.covariance;
      } catch (const Error& e) {
        for (Strategy st : ctx.strategies) {
          slot(st).failure = e.what();
          slot(st).converged = false;
        }
      }
    }

    if (want_optimal) {
      const EstimateRecord& cb = slot(Strategy::kCalibratedBiomarker);
      const EstimateRecord& csr = slot(Strategy::kCalibratedSelfReport);
      if (!cb.converged || !csr.converged || !joint) {
        slot(Strategy::kOptimal) =
            failed_record(Strategy::kOptimal, pc.n,
                          "calibrated estimates unavailable for combination");
      } else {
        Matrix cov = *joint;
        if (s.combine == CombineMode::kIndependent) {
          cov(0, 1) = cov(1, 0) = 0.0;
        }
        try {
          slot(Strategy::kOptimal) = optimal_combine(cb, csr, cov);
        } catch (const Error& e) {
          slot(Strategy::kOptimal) = failed_record(Strategy::kOptimal, pc.n, e.what());
        }
      }
    }
  }

  std::vector<EstimateRecord> out;
  out.reserve(strategies.size());
  for (Strategy st : strategies) out.push_back(slot(st));
  return out;
}

EstimateRecord estimate(Strategy strategy, const Cohort& cohort,
                        const EstimatorSettings& s, RngStream& stream) {
  if (strategy == Strategy::kOptimal) {
    throw Error(ErrorCode::kInvalidConfig,
                "OPTIMAL is built by optimal_combine, not estimate");
  }
  const Strategy one[] = {strategy};
  return estimate_strategies(one, cohort, s, stream).front();
}

}  // namespace regcal
