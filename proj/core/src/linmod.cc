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

#include "regcal/linmod.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "regcal/error.h"
#include "regcal/numerics.h"

namespace regcal {
namespace {

double total_sum_of_squares(std::span<const double> y) {
  const double m = mean(y);
  double s = 0.0;
  for (double v : y) s += (v - m) * (v - m);
  return s;
}

Matrix select_columns(const Matrix& x, std::span<const std::size_t> cols) {
  Matrix out(x.rows(), cols.size());
  for (std::size_t i = 0; i < x.rows(); ++i)
    for (std::size_t c = 0; c < cols.size(); ++c) out(i, c) = x(i, cols[c]);
  return out;
}

// Fit using the intercept plus the listed term indices (0-based into
// design.terms) of a frame built from the full design.
CalibrationFit fit_terms(const ModelFrame& frame, const Design& full,
                         std::span<const std::size_t> term_idx) {
  Design design = full;
  design.terms.clear();
  std::vector<std::size_t> cols{0};
  for (std::size_t t : term_idx) {
    design.terms.push_back(full.terms[t]);
    cols.push_back(t + 1);
  }
  ModelFrame sub;
  sub.x = select_columns(frame.x, cols);
  sub.y = frame.y;
  sub.rows = frame.rows;
  sub.n_dropped = frame.n_dropped;
  return fit_frame(sub, design);
}

}  // namespace

std::optional<double> CalibrationFit::coefficient(const std::string& term) const {
  for (std::size_t i = 0; i < term_names.size(); ++i)
    if (term_names[i] == term) return coefficients[i];
  return std::nullopt;
}

ModelFrame build_model_frame(const Table& data, const Design& design) {
  const auto& response = data.numeric(design.response);
  std::vector<const std::vector<double>*> terms;
  std::vector<double> centers;
  for (const auto& t : design.terms) {
    terms.push_back(&data.numeric(t));
    const auto it = design.centers.find(t);
    centers.push_back(it == design.centers.end() ? 0.0 : it->second);
  }

  const std::size_t n = data.rows();
  const auto missing_response = static_cast<std::size_t>(std::count_if(
      response.begin(), response.end(), [](double v) { return std::isnan(v); }));
  if (n > 0 && static_cast<double>(missing_response) >
                   design.max_response_missing * static_cast<double>(n)) {
    throw Error(ErrorCode::kExcessMissingness,
                "response '" + design.response + "' is missing in " +
                    std::to_string(missing_response) + " of " +
                    std::to_string(n) + " rows");
  }

  ModelFrame frame;
  std::vector<double> values;
  for (std::size_t i = 0; i < n; ++i) {
    bool complete = !std::isnan(response[i]);
    for (const auto* col : terms) complete = complete && !std::isnan((*col)[i]);
    if (!complete) {
      ++frame.n_dropped;
      continue;
    }
    frame.rows.push_back(i);
    frame.y.push_back(response[i]);
    values.push_back(1.0);
    for (std::size_t t = 0; t < terms.size(); ++t) {
      values.push_back((*terms[t])[i] - centers[t]);
    }
  }
  frame.x = Matrix::from_row_major(frame.rows.size(), terms.size() + 1,
                                   std::move(values));
  return frame;
}

CalibrationFit fit_frame(const ModelFrame& frame, const Design& design) {
  const std::size_t n = frame.y.size();
  const std::size_t p = frame.x.cols();
  if (n < p + 1) {
    throw Error(ErrorCode::kTooFewRows,
                std::to_string(n) + " complete rows for " + std::to_string(p) +
                    " coefficients");
  }
  const LeastSquaresResult ls = solve_least_squares(frame.x, frame.y);

  CalibrationFit fit;
  fit.design = design;
  fit.term_names.push_back(kInterceptName);
  for (const auto& t : design.terms) fit.term_names.push_back(t);
  fit.coefficients = ls.coefficients;
  fit.rss = ls.rss;
  fit.n_used = n;
  fit.n_dropped = frame.n_dropped;
  fit.residual_variance = ls.rss / static_cast<double>(n - p);
  fit.se.resize(p);
  for (std::size_t j = 0; j < p; ++j) {
    fit.se[j] = std::sqrt(fit.residual_variance * ls.unscaled_covariance(j, j));
  }
  fit.tss = total_sum_of_squares(frame.y);
  fit.r2 = fit.tss > 0.0 ? std::clamp(1.0 - fit.rss / fit.tss, 0.0, 1.0) : 0.0;
  return fit;
}

CalibrationFit fit_calibration(const Table& data, const Design& design) {
  return fit_frame(build_model_frame(data, design), design);
}

std::vector<double> predict(const CalibrationFit& fit, const Table& data) {
  std::vector<double> out(data.rows(), fit.coefficients.at(0));
  for (std::size_t t = 0; t < fit.design.terms.size(); ++t) {
    const auto& name = fit.design.terms[t];
    const auto& col = data.numeric(name);
    const auto it = fit.design.centers.find(name);
    const double center = it == fit.design.centers.end() ? 0.0 : it->second;
    for (std::size_t i = 0; i < out.size(); ++i) {
      out[i] += fit.coefficients[t + 1] * (col[i] - center);
    }
  }
  return out;
}

double r2_with_replicates(double r2, double icc, double j) {
  return r2 / (icc + (1.0 - icc) / j);
}

R2Family r2_family(double r2, double icc, std::span<const int> replicates) {
  if (!(icc > 0.0 && icc <= 1.0)) {
    throw Error(ErrorCode::kInvalidIcc,
                "icc " + std::to_string(icc) + " outside (0, 1]");
  }
  R2Family fam;
  fam.r2 = r2;
  fam.icc_used = icc;
  fam.prentice_r2 = r2 / icc;
  for (int j : replicates) {
    if (j < 1) throw Error(ErrorCode::kInvalidConfig, "replicate count < 1");
    fam.r2_new[j] = r2_with_replicates(r2, icc, j);
  }
  return fam;
}

R2Family r2_family(const CalibrationFit& fit, double icc,
                   std::span<const int> replicates) {
  return r2_family(fit.r2, icc, replicates);
}

R2Family r2_family(const Table& data, const Design& design, double icc,
                   std::span<const int> replicates) {
  const ModelFrame frame = build_model_frame(data, design);
  const CalibrationFit full = fit_frame(frame, design);
  R2Family fam = r2_family(full, icc, replicates);
  for (std::size_t drop = 0; drop < design.terms.size(); ++drop) {
    std::vector<std::size_t> keep;
    for (std::size_t t = 0; t < design.terms.size(); ++t)
      if (t != drop) keep.push_back(t);
    const CalibrationFit reduced = fit_terms(frame, design, keep);
    fam.partial_r2[design.terms[drop]] = partial_r2(full, reduced);
  }
  return fam;
}

double partial_r2(const CalibrationFit& full, const CalibrationFit& reduced) {
  if (full.n_used != reduced.n_used) {
    throw Error(ErrorCode::kNotNested,
                "full and reduced fits use different rows");
  }
  const double tol = 1e-10 * std::max(1.0, reduced.rss);
  if (reduced.rss < full.rss - tol) {
    throw Error(ErrorCode::kNotNested,
                "reduced model has smaller RSS than the full model");
  }
  if (reduced.rss <= 0.0) return 0.0;
  return std::clamp((reduced.rss - full.rss) / reduced.rss, 0.0, 1.0);
}

IccBacksolve backsolve_icc(double r2, std::span<const ReportedR2> reported) {
  if (reported.empty()) {
    throw Error(ErrorCode::kEmptyInput, "no reported summaries");
  }
  auto worst = [&](double icc) {
    double m = 0.0;
    for (const auto& r : reported) {
      const double implied = r.replicates ? r2_with_replicates(r2, icc, *r.replicates)
                                          : r2 / icc;
      m = std::max(m, std::abs(implied - r.value));
    }
    return m;
  };
  // Each implied summary is monotone in icc, so the worst deviation is
  // quasi-convex and golden-section search finds its minimum.
  const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double lo = 1e-9, hi = 1.0;
  double c = hi - phi * (hi - lo);
  double d = lo + phi * (hi - lo);
  double fc = worst(c), fd = worst(d);
  for (int i = 0; i < 200; ++i) {
    if (fc <= fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - phi * (hi - lo);
      fc = worst(c);
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + phi * (hi - lo);
      fd = worst(d);
    }
  }
  const double icc = 0.5 * (lo + hi);
  return {icc, worst(icc)};
}

double gaussian_aic(std::size_t n, double rss, std::size_t num_coefficients) {
  const double nn = static_cast<double>(n);
  return nn * std::log(rss / nn) + 2.0 * (static_cast<double>(num_coefficients) + 1.0);
}

StepwiseResult stepwise_aic(const Table& data, const Design& full_design) {
  if (full_design.terms.size() < 2) {
    throw Error(ErrorCode::kInvalidConfig,
                "stepwise selection needs at least two candidate terms");
  }
  const ModelFrame frame = build_model_frame(data, full_design);
  const std::size_t n = frame.y.size();

  auto evaluate = [&](const std::vector<bool>& included) {
    std::vector<std::size_t> cols{0};
    for (std::size_t t = 0; t < included.size(); ++t)
      if (included[t]) cols.push_back(t + 1);
    const Matrix x = select_columns(frame.x, cols);
    const LeastSquaresResult ls = solve_least_squares(x, frame.y);
    return gaussian_aic(n, ls.rss, cols.size());
  };

  StepwiseResult result;
  result.full = fit_frame(frame, full_design);
  result.full_aic = gaussian_aic(n, result.full.rss, result.full.num_coefficients());

  const std::size_t k = full_design.terms.size();
  std::vector<bool> included(k, true);
  double current = result.full_aic;
  constexpr double kTieTol = 1e-12;
  for (std::size_t guard = 0; guard < 4 * k + 4; ++guard) {
    std::optional<std::size_t> best;
    double best_aic = std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t < k; ++t) {
      std::vector<bool> trial = included;
      trial[t] = !trial[t];
      double aic;
      try {
        aic = evaluate(trial);
      } catch (const Error& e) {
        if (e.code() == ErrorCode::kRankDeficient) continue;
        throw;
      }
      const bool better = aic < best_aic - kTieTol;
      const bool tie_wins = std::abs(aic - best_aic) <= kTieTol && best &&
                            full_design.terms[t] < full_design.terms[*best];
      if (better || tie_wins) {
        best = t;
        best_aic = aic;
      }
    }
    if (!best || !(best_aic < current - kTieTol)) break;
    result.steps.push_back({included[*best] ? StepRecord::Action::kDrop
                                            : StepRecord::Action::kAdd,
                            full_design.terms[*best], best_aic});
    included[*best] = !included[*best];
    current = best_aic;
  }

  std::vector<std::size_t> keep;
  for (std::size_t t = 0; t < k; ++t)
    if (included[t]) keep.push_back(t);
  result.selected = fit_terms(frame, full_design, keep);
  result.selected_aic = current;
  return result;
}

OptimismResult optimism_from_resamples(
    const ModelFrame& frame,
    std::span<const std::vector<std::size_t>> resamples) {
  OptimismResult out;
  const LeastSquaresResult apparent = solve_least_squares(frame.x, frame.y);
  const double tss = total_sum_of_squares(frame.y);
  out.apparent_r2 = 1.0 - apparent.rss / tss;

  const std::size_t p = frame.x.cols();
  double optimism_sum = 0.0;
  for (const auto& idx : resamples) {
    Matrix xb(idx.size(), p);
    std::vector<double> yb(idx.size());
    for (std::size_t r = 0; r < idx.size(); ++r) {
      const auto src = frame.x.row(idx[r]);
      std::copy(src.begin(), src.end(), xb.row(r).begin());
      yb[r] = frame.y[idx[r]];
    }
    LeastSquaresResult fit;
    try {
      fit = solve_least_squares(xb, yb);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kRankDeficient &&
          e.code() != ErrorCode::kTooFewRows) {
        throw;
      }
      ++out.replicates_skipped;
      continue;
    }
    const double tss_b = total_sum_of_squares(yb);
    if (!(tss_b > 0.0)) {
      ++out.replicates_skipped;
      continue;
    }
    const double r2_boot = 1.0 - fit.rss / tss_b;
    double rss_orig = 0.0;
    for (std::size_t i = 0; i < frame.y.size(); ++i) {
      double fitted = 0.0;
      const auto xi = frame.x.row(i);
      for (std::size_t j = 0; j < p; ++j) fitted += xi[j] * fit.coefficients[j];
      rss_orig += (frame.y[i] - fitted) * (frame.y[i] - fitted);
    }
    optimism_sum += r2_boot - (1.0 - rss_orig / tss);
    ++out.replicates_used;
  }
  if (out.replicates_used == 0) {
    throw Error(ErrorCode::kDegenerateResample,
                "every bootstrap resample was rank deficient");
  }
  out.mean_optimism = optimism_sum / static_cast<double>(out.replicates_used);
  out.corrected_r2 = out.apparent_r2 - out.mean_optimism;
  return out;
}

OptimismResult optimism_corrected_r2(const Table& data, const Design& design,
                                     std::size_t replicates,
                                     RngStream& stream) {
  if (replicates < 1) {
    throw Error(ErrorCode::kInvalidConfig, "need at least one bootstrap replicate");
  }
  const ModelFrame frame = build_model_frame(data, design);
  const std::size_t n = frame.y.size();
  if (n < frame.x.cols() + 1) {
    throw Error(ErrorCode::kTooFewRows, "too few complete rows for the design");
  }
  std::vector<std::vector<std::size_t>> resamples(replicates);
  for (auto& idx : resamples) {
    idx.resize(n);
    for (auto& i : idx) i = stream.uniform_index(n);
  }
  return optimism_from_resamples(frame, resamples);
}

}  // namespace regcal
