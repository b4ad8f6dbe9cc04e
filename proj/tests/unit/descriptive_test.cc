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

#include "regcal/descriptive.h"

#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "regcal/error.h"
#include "regcal/rng.h"

namespace regcal {
namespace {

DuplicatePairs make_pairs(std::vector<double> a, std::vector<double> b) {
  DuplicatePairs p;
  p.analyte = "test";
  p.first = std::move(a);
  p.second = std::move(b);
  return p;
}

TEST(GeoMean, ConstantValueNoAdjusters) {
  Table t;
  t.add_numeric("logv", std::vector<double>(6, 1.7));
  t.add_text("g", std::vector<std::string>(6, "all"));
  const auto rows = adjusted_geomean(t, "logv", {}, "g");
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_NEAR(rows[0].geometric_mean, std::exp(1.7), 1e-12);
  EXPECT_NEAR(rows[0].ci_high - rows[0].ci_low, 0.0, 1e-12);
  EXPECT_EQ(rows[0].n, 6u);
}

TEST(GeoMean, MatchesDirectProduct) {
  RngStream s(1, 0);
  std::vector<double> raw(20), logs(20);
  for (int i = 0; i < 20; ++i) {
    raw[i] = 0.5 + 3.0 * s.uniform();
    logs[i] = std::log(raw[i]);
  }
  long double prod = 1.0L;
  for (double v : raw) prod *= v;
  const double direct = std::pow(static_cast<double>(prod), 1.0 / 20.0);
  Table t;
  t.add_numeric("logv", logs);
  t.add_text("g", std::vector<std::string>(20, "x"));
  const auto rows = adjusted_geomean(t, "logv", {}, "g");
  EXPECT_NEAR(rows[0].geometric_mean, direct, 1e-10 * direct);
}

TEST(GeoMean, KnownShiftBetweenBalancedGroups) {
  RngStream s(2, 0);
  const double delta = 0.4;
  std::vector<double> logs, age;
  std::vector<std::string> group;
  for (int i = 0; i < 400; ++i) {
    const double a = 30.0 + 30.0 * s.uniform();
    const bool second = i % 2 == 1;
    age.push_back(a);
    group.push_back(second ? "b" : "a");
    logs.push_back(1.0 + 0.02 * (a - 45.0) + (second ? delta : 0.0) + 0.1 * s.normal());
  }
  Table t;
  t.add_numeric("logv", logs);
  t.add_numeric("age", age);
  t.add_text("grp", group);
  const auto rows = adjusted_geomean(t, "logv", {{"age", 45.0}}, "grp");
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0].group, "a");
  const double ratio = rows[1].geometric_mean / rows[0].geometric_mean;
  const double half_width = std::log(rows[1].ci_high / rows[1].ci_low) / 2.0 +
                            std::log(rows[0].ci_high / rows[0].ci_low) / 2.0;
  EXPECT_NEAR(std::log(ratio), delta, half_width);
  EXPECT_LT(rows[0].ci_low, rows[0].geometric_mean);
  EXPECT_GT(rows[0].ci_high, rows[0].geometric_mean);
  EXPECT_LT(rows[0].pct_low, rows[0].pct_high);
}

TEST(GeoMean, CenteredAdjustersReproduceUnadjustedMeans) {
  RngStream s(3, 0);
  std::vector<double> logs, age;
  std::vector<std::string> group;
  const char* labels[] = {"x", "y", "z"};
  // Age is balanced across groups by construction, so centring at the
  // overall mean leaves each group's mean unchanged.
  for (int i = 0; i < 90; ++i) {
    age.push_back(20.0 + (i / 3) % 30);
    group.push_back(labels[i % 3]);
    logs.push_back(0.3 * (i % 3) + 0.01 * age.back() + 0.2 * s.normal());
  }
  double age_mean = 0.0;
  for (double a : age) age_mean += a;
  age_mean /= age.size();
  Table t;
  t.add_numeric("logv", logs);
  t.add_numeric("age", age);
  t.add_text("grp", group);
  const auto adj = adjusted_geomean(t, "logv", {{"age", age_mean}}, "grp");
  for (int g = 0; g < 3; ++g) {
    double m = 0.0;
    int n = 0;
    for (int i = 0; i < 90; ++i) {
      if (i % 3 == g) {
        m += logs[i];
        ++n;
      }
    }
    EXPECT_NEAR(adj[g].geometric_mean, std::exp(m / n), 1e-8);
  }
}

TEST(GeoMean, MissingRowsDroppedAndSmallGroupsRejected) {
  Table t;
  t.add_numeric("logv", {1, 2, NAN, 3, 4, 5});
  t.add_numeric("age", {1, 2, 3, 4, 5, 6});
  t.add_text("grp", {"a", "a", "a", "a", "b", "b"});
  EXPECT_THROW(adjusted_geomean(t, "logv", {{"age", 3.0}}, "grp"), Error);
  const auto rows = adjusted_geomean(t, "logv", {}, "grp");
  EXPECT_EQ(rows[0].n, 3u);
  EXPECT_EQ(rows[1].n, 2u);
}

TEST(DuplicateIcc, IdenticalPairs) {
  EXPECT_NEAR(duplicate_icc(make_pairs({1, 4, 2, 8}, {1, 4, 2, 8})), 1.0, 1e-15);
}

TEST(DuplicateIcc, HandFormula) {
  const auto p = make_pairs({1, 2, 3}, {2, 1, 3});
  // Means 2 and 2; cross products (-1)(0) + (0)(-1) + (1)(1) = 1; sums of
  // squares 2 and 2.
  EXPECT_NEAR(duplicate_icc(p), 1.0 / 2.0, 1e-15);
}

TEST(DuplicateIcc, IndependentPairsNearZero) {
  RngStream s(4, 0);
  DuplicatePairs p;
  for (int i = 0; i < 10000; ++i) {
    p.first.push_back(s.normal());
    p.second.push_back(s.normal());
  }
  EXPECT_LT(std::fabs(duplicate_icc(p)), 0.05);
}

TEST(DuplicateIcc, AffineInvariance) {
  RngStream s(5, 0);
  DuplicatePairs p, q;
  for (int i = 0; i < 50; ++i) {
    const double x = s.normal();
    p.first.push_back(x + 0.5 * s.normal());
    p.second.push_back(x + 0.5 * s.normal());
    q.first.push_back(3.0 * p.first.back() + 7.0);
    q.second.push_back(3.0 * p.second.back() + 7.0);
  }
  EXPECT_NEAR(duplicate_icc(p), duplicate_icc(q), 1e-12);
}

TEST(DuplicateIcc, Errors) {
  EXPECT_THROW(duplicate_icc(make_pairs({1, 2}, {1, 2})), Error);
  try {
    duplicate_icc(make_pairs({1, 1, 1}, {1, 2, 3}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDegenerateVariance);
  }
}

TEST(DuplicateCv, ExactDuplicates) {
  EXPECT_EQ(duplicate_cv(make_pairs({3, 5, 9}, {3, 5, 9})), 0.0);
}

TEST(DuplicateCv, AnovaOracle) {
  const auto p = make_pairs({9, 19}, {11, 21});
  EXPECT_NEAR(duplicate_variance_components(p).within, 2.0, 1e-12);
  EXPECT_NEAR(duplicate_cv(p), 100.0 * std::sqrt(2.0) / 15.0, 1e-10);
  EXPECT_NEAR(duplicate_cv(p), 9.428, 0.0005);
}

TEST(DuplicateCv, MatchesOneWayAnovaMeanSquareWithin) {
  RngStream s(6, 0);
  for (int trial = 0; trial < 20; ++trial) {
    DuplicatePairs p;
    const int m = 3 + trial;
    for (int i = 0; i < m; ++i) {
      const double mu = 10.0 + 3.0 * s.normal();
      p.first.push_back(mu + s.normal());
      p.second.push_back(mu + s.normal());
    }
    // One-way ANOVA: SS_within = sum over subjects of sum (x - subject mean)^2
    // with m (2 - 1) degrees of freedom.
    double ss_within = 0.0;
    for (int i = 0; i < m; ++i) {
      const double bar = 0.5 * (p.first[i] + p.second[i]);
      ss_within += (p.first[i] - bar) * (p.first[i] - bar) +
                   (p.second[i] - bar) * (p.second[i] - bar);
    }
    EXPECT_NEAR(duplicate_variance_components(p).within, ss_within / m, 1e-10);
  }
}

TEST(DuplicateCv, ScaleInvariance) {
  const auto p = make_pairs({4.1, 5.2, 6.3, 2.2}, {3.9, 5.6, 6.0, 2.5});
  auto q = p;
  for (auto& v : q.first) v *= 10.0;
  for (auto& v : q.second) v *= 10.0;
  EXPECT_NEAR(duplicate_cv(p), duplicate_cv(q), 1e-10);
}

TEST(DuplicateCv, Errors) {
  EXPECT_THROW(duplicate_cv(make_pairs({1}, {1})), Error);
  try {
    duplicate_cv(make_pairs({1, -2}, {1, 2}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNonPositiveValues);
  }
}

TEST(VarianceComponents, BetweenClampedAtZero) {
  // Within-pair spread dwarfs between-subject spread.
  const auto p = make_pairs({0, 10, 0, 10}, {10, 0, 10, 0});
  const auto vc = duplicate_variance_components(p);
  EXPECT_EQ(vc.between, 0.0);
  EXPECT_NEAR(vc.within, 50.0, 1e-12);
}

TEST(DuplicatePairsFromLong, GroupsByAnalyteAndId) {
  Table t;
  t.add_text("analyte", {"a", "a", "a", "a", "a", "b", "b", "b"});
  t.add_text("id", {"1", "1", "2", "2", "3", "1", "1", "1"});
  t.add_numeric("replicate_index", {1, 2, 2, 1, 1, 3, 1, 2});
  t.add_numeric("value", {5, 6, 8, 7, 9, 30, 10, 20});
  const auto pairs = duplicate_pairs_from_long(t);
  ASSERT_EQ(pairs.size(), 2u);
  EXPECT_EQ(pairs[0].analyte, "a");
  EXPECT_EQ(pairs[0].size(), 2u);
  EXPECT_EQ(pairs[0].dropped_half_pairs, 1u);
  EXPECT_EQ(pairs[0].first, (std::vector<double>{5, 7}));
  EXPECT_EQ(pairs[0].second, (std::vector<double>{6, 8}));
  EXPECT_EQ(pairs[1].first, (std::vector<double>{10}));
  EXPECT_EQ(pairs[1].second, (std::vector<double>{20}));
}

TEST(DuplicatePairsFromLong, MissingColumnNamed) {
  Table t;
  t.add_text("analyte", {"a"});
  t.add_text("id", {"1"});
  t.add_numeric("value", {1});
  try {
    duplicate_pairs_from_long(t);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kSchemaViolation);
    EXPECT_NE(std::string(e.what()).find("replicate_index"), std::string::npos);
  }
}

}  // namespace
}  // namespace regcal
