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

#include <cmath>
#include <numeric>
#include <vector>

#include <gtest/gtest.h>

#include "regcal/error.h"
#include "regcal/numerics.h"

namespace regcal {
namespace {

Cohort make_cohort(const std::string& name, std::size_t n, std::size_t sub,
                   std::size_t rel, std::uint64_t seed) {
  Scenario sc = build_scenario(name);
  sc.n_cohort = n;
  sc.n_substudy = sub;
  sc.n_reliability = rel;
  RngStream cal(seed, 1000);
  calibrate_lambda0(sc, 0.85, cal, 50000);
  RngStream s(seed, 0);
  return generate_cohort(sc, s);
}

TEST(Strategy, NamesRoundTrip) {
  for (Strategy s : kAllStrategies) EXPECT_EQ(parse_strategy(to_string(s)), s);
  EXPECT_FALSE(parse_strategy("truth").has_value());
  EXPECT_EQ(to_string(Strategy::kCalibratedSelfReport), "CALIBRATED_SELFREPORT");
  EXPECT_TRUE(uses_full_cohort(Strategy::kNaiveSelfReport));
  EXPECT_FALSE(uses_full_cohort(Strategy::kNaiveBiomarker));
  EXPECT_FALSE(uses_full_cohort(Strategy::kCalibratedBiomarker));
}

TEST(ReplicateErrorVariance, Formula) {
  const std::vector<double> a{1, 2, 3}, b{2, 2, 1};
  EXPECT_DOUBLE_EQ(replicate_error_variance(a, b), (1.0 + 0.0 + 4.0) / 6.0);
  EXPECT_THROW(replicate_error_variance({}, {}), Error);
}

TEST(ExposureSeries, TruthIsIdentity) {
  const Cohort c = make_cohort("folate", 500, 60, 20, 1);
  const ExposureSeries s = exposure_series(Strategy::kTruth, c, {});
  ASSERT_EQ(s.rows.size(), 500u);
  for (std::size_t k = 0; k < 500; ++k) EXPECT_EQ(s.exposure[k], c.rows[k].x_true);
}

TEST(ExposureSeries, CalibratedSelfReportAtCenters) {
  Cohort c = make_cohort("folate", 200, 60, 20, 2);
  c.rows[100].x_star = 1.0;
  c.rows[100].age = 46.1;
  c.rows[100].bmi = 29.6;
  CalibrationModels fits;
  fits.self_report = SelfReportCalibration{{0.3, 0.7, 0.01, -0.02}, 46.1, 29.6};
  const ExposureSeries s = exposure_series(Strategy::kCalibratedSelfReport, c, fits);
  EXPECT_NEAR(s.exposure[100], 1.0, 1e-15);
}

TEST(ExposureSeries, CalibratedSelfReportIgnoresObservedBiomarker) {
  Cohort c = make_cohort("beta_cryptoxanthin", 300, 80, 20, 3);
  const EstimatorSettings s;
  const CalibrationModels fits = fit_calibration_models(c, s);
  const ExposureSeries before = exposure_series(Strategy::kCalibratedSelfReport, c, fits);
  for (auto& r : c.rows) {
    if (r.x_biomarker) *r.x_biomarker += 5.0;
  }
  const ExposureSeries after = exposure_series(Strategy::kCalibratedSelfReport, c, fits);
  EXPECT_EQ(before.exposure, after.exposure);
}

TEST(ExposureSeries, CalibratedBiomarkerWithoutErrorIsRaw) {
  const Cohort c = make_cohort("lycopene", 300, 80, 20, 4);
  const EstimatorSettings s;
  CalibrationModels fits = fit_calibration_models(c, s);
  fits.biomarker->sigma_eps2 = 0.0;
  fits.biomarker->shrinkage = 1.0;
  const ExposureSeries series = exposure_series(Strategy::kCalibratedBiomarker, c, fits);
  ASSERT_EQ(series.rows.size(), 80u);
  for (std::size_t k = 0; k < series.rows.size(); ++k) {
    EXPECT_EQ(series.exposure[k], *c.rows[series.rows[k]].x_biomarker);
  }
}

TEST(ExposureSeries, MissingFitOrRows) {
  const Cohort c = make_cohort("folate", 100, 10, 5, 5);
  try {
    exposure_series(Strategy::kCalibratedBiomarker, c, {});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kMissingFit);
  }
  Cohort none = c;
  for (auto& r : none.rows) {
    r.in_substudy = false;
    r.x_biomarker.reset();
  }
  try {
    exposure_series(Strategy::kNaiveBiomarker, none, {});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kEmptyAnalysisSet);
  }
}

TEST(BiomarkerCalibration, ShrinkageFromReplicates) {
  const Cohort c = make_cohort("beta_cryptoxanthin", 3000, 3000, 3000, 6);
  const EstimatorSettings s;
  const BiomarkerCalibration b = fit_biomarker_calibration(c, s);
  EXPECT_NEAR(b.sigma_eps2, 0.01070956, 0.0015);
  EXPECT_GT(b.shrinkage, 0.0);
  EXPECT_LT(b.shrinkage, 1.0);
  EXPECT_NEAR(b.shrinkage, (b.residual_variance - b.sigma_eps2) / b.residual_variance,
              1e-12);
}

TEST(AttenuationLaw, NaiveSlopeShrinksByReliability) {
  // Linear analogue of the measurement-error mechanism: y = b x + e and
  // w = x + u gives an OLS slope of r b with r = var(x) / (var(x) + var(u)).
  RngStream s(7, 0);
  const std::size_t n = 50000;
  const double b = 1.5, var_u = 0.6;
  Matrix w(n, 2);
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = s.normal();
    w(i, 0) = 1.0;
    w(i, 1) = x + std::sqrt(var_u) * s.normal();
    y[i] = b * x + s.normal();
  }
  const double r = 1.0 / (1.0 + var_u);
  const double slope = solve_least_squares(w, y).coefficients[1];
  EXPECT_NEAR(slope / b, r, 0.02);
}

TEST(StratifiedResample, StrataSizesPreserved) {
  const std::vector<std::vector<std::size_t>> strata{{0, 1, 2}, {3, 4, 5, 6, 7}};
  RngStream s(8, 0);
  for (int t = 0; t < 50; ++t) {
    const auto w = stratified_resample_weights(strata, 9, s);
    EXPECT_EQ(w[0] + w[1] + w[2], 3.0);
    EXPECT_EQ(w[3] + w[4] + w[5] + w[6] + w[7], 5.0);
    EXPECT_EQ(w[8], 0.0);
  }
}

TEST(StratifiedBootstrap, IdenticalRowsGiveZeroSe) {
  const std::vector<std::vector<std::size_t>> strata{{0, 1, 2, 3}, {4, 5}};
  const std::vector<double> values{2, 2, 2, 2, 7, 7};
  RngStream s(9, 0);
  const auto out = stratified_bootstrap(
      strata, 6, 100, s,
      [&](std::span<const double> w) {
        double a = 0, wa = 0, b = 0, wb = 0;
        for (std::size_t i = 0; i < 4; ++i) {
          a += w[i] * values[i];
          wa += w[i];
        }
        for (std::size_t i = 4; i < 6; ++i) {
          b += w[i] * values[i];
          wb += w[i];
        }
        return std::vector<double>{a / wa, b / wb};
      },
      2);
  EXPECT_EQ(out[0].se, 0.0);
  EXPECT_EQ(out[1].se, 0.0);
  EXPECT_EQ(out[0].ci_low, 2.0);
  EXPECT_EQ(out[1].ci_high, 7.0);
}

TEST(StratifiedBootstrap, OlsSlopeSeMatchesAnalytic) {
  RngStream gen(10, 0);
  const std::size_t n = 200;
  std::vector<double> x(n), y(n);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = gen.normal();
    y[i] = 0.5 + 2.0 * x[i] + gen.normal();
  }
  Matrix design(n, 2);
  for (std::size_t i = 0; i < n; ++i) {
    design(i, 0) = 1.0;
    design(i, 1) = x[i];
  }
  const auto ls = solve_least_squares(design, y);
  const double analytic =
      std::sqrt(ls.rss / (n - 2.0) * ls.unscaled_covariance(1, 1));
  std::vector<std::size_t> all(n);
  std::iota(all.begin(), all.end(), 0);
  const std::vector<std::vector<std::size_t>> strata{all};
  RngStream s(10, 1);
  const auto out = stratified_bootstrap(
      strata, n, 1000, s,
      [&](std::span<const double> w) {
        double sw = 0, sx = 0, sy = 0;
        for (std::size_t i = 0; i < n; ++i) {
          sw += w[i];
          sx += w[i] * x[i];
          sy += w[i] * y[i];
        }
        const double mx = sx / sw, my = sy / sw;
        double sxy = 0, sxx = 0;
        for (std::size_t i = 0; i < n; ++i) {
          sxy += w[i] * (x[i] - mx) * (y[i] - my);
          sxx += w[i] * (x[i] - mx) * (x[i] - mx);
        }
        return std::vector<double>{sxy / sxx};
      },
      1);
  EXPECT_NEAR(out[0].se / analytic, 1.0, 0.15);
}

TEST(StratifiedBootstrap, ReplicateOrderIndependent) {
  const std::vector<std::vector<std::size_t>> strata{{0, 1, 2, 3, 4}};
  auto stat = [](std::span<const double> w) {
    return std::vector<double>{w[0] * 10 + w[1]};
  };
  RngStream a(11, 0);
  const auto full = stratified_bootstrap(strata, 5, 60, a, stat, 1);
  // Replicate b depends only on child(b): recompute replicate 37 alone.
  RngStream child = RngStream(11, 0).child(37);
  const auto w = stratified_resample_weights(strata, 5, child);
  EXPECT_EQ(full[0].replicates[37], stat(w)[0]);
}

TEST(SummarizeReplicates, FailuresExcluded) {
  const auto s = summarize_replicates({1, 2, NAN, 3, 4, NAN});
  EXPECT_EQ(s.failed, 2u);
  EXPECT_NEAR(s.se, std::sqrt(5.0 / 3.0), 1e-14);
  EXPECT_NEAR(s.ci_low, 1.075, 1e-14);
  EXPECT_NEAR(s.ci_high, 3.925, 1e-14);
}

TEST(OptimalCombine, EqualVariancesAverage) {
  EstimateRecord cb, csr;
  cb.beta1_hat = -0.2;
  csr.beta1_hat = -0.4;
  const Matrix cov{{0.04, 0.0}, {0.0, 0.04}};
  const EstimateRecord r = optimal_combine(cb, csr, cov);
  EXPECT_NEAR(r.beta1_hat, -0.3, 1e-15);
  EXPECT_NEAR(r.se, 0.2 / std::sqrt(2.0), 1e-15);
  EXPECT_EQ(r.strategy, Strategy::kOptimal);
  EXPECT_EQ(r.ci_kind, CiKind::kWald);
  EXPECT_NEAR(r.ci_high - r.beta1_hat, 1.959963984540054 * r.se, 1e-15);
}

TEST(OptimalCombine, HugeVarianceDefersToOther) {
  EstimateRecord cb, csr;
  cb.beta1_hat = -0.25;
  csr.beta1_hat = 0.9;
  const Matrix cov{{0.01, 0.0}, {0.0, 1e12}};
  EXPECT_NEAR(optimal_combine(cb, csr, cov).beta1_hat, -0.25, 1e-6);
}

TEST(OptimalCombine, DiagonalWeightsStayBetween) {
  RngStream s(12, 0);
  for (int t = 0; t < 200; ++t) {
    EstimateRecord cb, csr;
    cb.beta1_hat = s.normal();
    csr.beta1_hat = s.normal();
    const Matrix cov{{0.01 + s.uniform(), 0.0}, {0.0, 0.01 + s.uniform()}};
    const double b = optimal_combine(cb, csr, cov).beta1_hat;
    EXPECT_GE(b, std::min(cb.beta1_hat, csr.beta1_hat) - 1e-15);
    EXPECT_LE(b, std::max(cb.beta1_hat, csr.beta1_hat) + 1e-15);
  }
}

TEST(OptimalCombine, CorrelatedMatchesGlsFormula) {
  EstimateRecord cb, csr;
  cb.beta1_hat = -0.3;
  csr.beta1_hat = -0.1;
  const Matrix cov{{0.02, 0.006}, {0.006, 0.01}};
  const Matrix inv = invert_spd(cov);
  const double w1 = inv(0, 0) + inv(0, 1), w2 = inv(1, 0) + inv(1, 1);
  const EstimateRecord r = optimal_combine(cb, csr, cov);
  EXPECT_NEAR(r.beta1_hat, (w1 * -0.3 + w2 * -0.1) / (w1 + w2), 1e-12);
  EXPECT_NEAR(r.se, std::sqrt(1.0 / (w1 + w2)), 1e-12);
}

TEST(OptimalCombine, SingularCovariance) {
  EstimateRecord cb, csr;
  try {
    optimal_combine(cb, csr, Matrix{{1.0, 1.0}, {1.0, 1.0}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kSingularCovariance);
  }
}

TEST(Estimate, NoErrorFullSubstudyCollapsesToTruth) {
  Scenario sc = build_scenario("folate");
  sc.n_cohort = sc.n_substudy = 2000;
  sc.n_reliability = 50;
  sc.sigma_eps2 = 0.0;
  RngStream cal(13, 1);
  calibrate_lambda0(sc, 0.85, cal, 50000);
  RngStream g(13, 0);
  const Cohort c = generate_cohort(sc, g);
  const EstimatorSettings s;
  RngStream st(13, 2);
  const EstimateRecord truth = estimate(Strategy::kTruth, c, s, st);
  const EstimateRecord naive = estimate(Strategy::kNaiveBiomarker, c, s, st);
  EXPECT_EQ(truth.beta1_hat, naive.beta1_hat);
  EXPECT_EQ(truth.se, naive.se);
  EXPECT_EQ(truth.ci_low, naive.ci_low);
}

TEST(Estimate, RejectsOptimal) {
  const Cohort c = make_cohort("folate", 200, 50, 10, 14);
  RngStream st(14, 2);
  EXPECT_THROW(estimate(Strategy::kOptimal, c, EstimatorSettings{}, st), Error);
}

TEST(EstimateStrategies, AllSixOnSmallCohort) {
  const Cohort c = make_cohort("beta_cryptoxanthin", 3000, 400, 80, 15);
  EstimatorSettings s;
  s.n_boot = 60;
  RngStream st(15, 2);
  const auto recs = estimate_strategies(kAllStrategies, c, s, st);
  ASSERT_EQ(recs.size(), 6u);
  for (std::size_t k = 0; k < 6; ++k) {
    const EstimateRecord& r = recs[k];
    EXPECT_EQ(r.strategy, kAllStrategies[k]);
    EXPECT_TRUE(r.converged) << to_string(r.strategy) << ": " << r.failure;
    EXPECT_LT(r.ci_low, r.beta1_hat);
    EXPECT_GT(r.ci_high, r.beta1_hat);
    EXPECT_GT(r.se, 0.0);
    EXPECT_EQ(r.ci_kind, is_calibrated(r.strategy) ? CiKind::kPercentile : CiKind::kWald);
  }
  EXPECT_EQ(recs[0].n_analysis, 3000u);
  EXPECT_EQ(recs[1].n_analysis, 400u);
  EXPECT_EQ(recs[2].n_analysis, 400u);
  EXPECT_EQ(recs[4].n_analysis, 3000u);

  // Same stream identity, same answers.
  RngStream again(15, 2);
  const auto recs2 = estimate_strategies(kAllStrategies, c, s, again);
  for (std::size_t k = 0; k < 6; ++k) {
    EXPECT_EQ(recs[k].beta1_hat, recs2[k].beta1_hat);
    EXPECT_EQ(recs[k].se, recs2[k].se);
    EXPECT_EQ(recs[k].ci_low, recs2[k].ci_low);
  }
}

TEST(EstimateStrategies, IndependentCombineDiffersOnlyInOptimal) {
  const Cohort c = make_cohort("beta_cryptoxanthin", 2000, 300, 60, 16);
  EstimatorSettings joint;
  joint.n_boot = 50;
  EstimatorSettings indep = joint;
  indep.combine = CombineMode::kIndependent;
  RngStream a(16, 2), b(16, 2);
  const auto rj = estimate_strategies(kAllStrategies, c, joint, a);
  const auto ri = estimate_strategies(kAllStrategies, c, indep, b);
  for (std::size_t k = 0; k < 5; ++k) EXPECT_EQ(rj[k].beta1_hat, ri[k].beta1_hat);
  EXPECT_NE(rj[5].se, ri[5].se);
}

TEST(BootstrapInference, Preconditions) {
  const Cohort c = make_cohort("folate", 1500, 400, 80, 17);
  EstimatorSettings s;
  s.n_boot = 10;
  RngStream st(17, 0);
  const Strategy cb[] = {Strategy::kCalibratedBiomarker};
  EXPECT_THROW(bootstrap_inference(cb, c, s, st), Error);
  s.n_boot = 50;
  const Strategy truth[] = {Strategy::kTruth};
  EXPECT_THROW(bootstrap_inference(truth, c, s, st), Error);
  const Strategy pair[] = {Strategy::kCalibratedBiomarker, Strategy::kCalibratedSelfReport};
  const BootstrapInference inf = bootstrap_inference(pair, c, s, st);
  ASSERT_TRUE(inf.covariance.has_value());
  EXPECT_GT((*inf.covariance)(0, 0), 0.0);
  EXPECT_NEAR((*inf.covariance)(0, 0), inf.summaries[0].se * inf.summaries[0].se,
              1e-12);
}

}  // namespace
}  // namespace regcal
