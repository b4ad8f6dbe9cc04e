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

#include "cli.h"

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "regcal/cohort_io.h"
#include "regcal/datagen.h"
#include "regcal/estimators.h"
#include "regcal/scenario_io.h"
#include "regcal/table.h"

namespace regcal {
namespace {

namespace fs = std::filesystem;

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::temp_directory_path() / ("regcal_cli_" + std::string(info->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string path(const std::string& leaf) const { return (dir_ / leaf).string(); }

  fs::path dir_;
};

void expect_csv_round_trip(const fs::path& p) {
  const std::string bytes = slurp(p);
  std::istringstream in(bytes);
  std::ostringstream again;
  write_csv(again, read_csv(in));
  EXPECT_EQ(again.str(), bytes) << p;
}

TEST_F(CliTest, SimulateWritesReports) {
  const Outcome r = run({"simulate", "--scenario", "folate", "--sims", "3", "--boot", "50",
                     "--seed", "7", "--quiet", "--out", path("a")});
  ASSERT_EQ(r.code, 0) << r.err;
  const Table metrics = read_csv_file(path("a/metrics.csv"));
  EXPECT_EQ(metrics.rows(), 6u);
  EXPECT_EQ(metrics.text("strategy")[5], "OPTIMAL");
  EXPECT_EQ(read_csv_file(path("a/records.csv")).rows(), 18u);
  const std::string manifest = slurp(path("a/manifest.json"));
  EXPECT_NE(manifest.find("\"master_seed\": 7"), std::string::npos);
  EXPECT_NE(manifest.find("\"lambda0\""), std::string::npos);
  EXPECT_NE(manifest.find("\"version\""), std::string::npos);
  EXPECT_NE(slurp(path("a/metrics.txt")).find("CALIBRATED_SELFREPORT"), std::string::npos);
  expect_csv_round_trip(path("a/metrics.csv"));
  expect_csv_round_trip(path("a/records.csv"));
}

TEST_F(CliTest, SimulateIsDeterministic) {
  const std::vector<std::string> base{"simulate", "--scenario", "beta_cryptoxanthin",
                                      "--sims", "3", "--boot", "50", "--seed", "11",
                                      "--quiet"};
  auto with = [&](std::string out, std::string workers) {
    auto a = base;
    a.insert(a.end(), {"--out", path(out), "--workers", workers});
    return a;
  };
  ASSERT_EQ(run(with("x", "1")).code, 0);
  ASSERT_EQ(run(with("y", "1")).code, 0);
  ASSERT_EQ(run(with("z", "3")).code, 0);
  EXPECT_EQ(slurp(path("x/metrics.csv")), slurp(path("y/metrics.csv")));
  EXPECT_EQ(slurp(path("x/metrics.csv")), slurp(path("z/metrics.csv")));
  EXPECT_EQ(slurp(path("x/records.csv")), slurp(path("z/records.csv")));
}

TEST_F(CliTest, UnknownScenarioIsConfigError) {
  const Outcome r = run({"simulate", "--scenario", "nosuch", "--out", path("o")});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("nosuch"), std::string::npos);
}

TEST_F(CliTest, UsageErrors) {
  EXPECT_EQ(run({}).code, 2);
  EXPECT_EQ(run({"frobnicate"}).code, 2);
  EXPECT_EQ(run({"simulate", "--scenario", "folate", "--bogus"}).code, 2);
  EXPECT_EQ(run({"simulate", "--scenario", "folate", "--sims", "0"}).code, 2);
  EXPECT_EQ(run({"simulate", "--scenario", "folate", "--strategies", "TRUTH,NOPE"}).code, 2);
  EXPECT_EQ(run({"simulate", "--scenario", "folate", "--lambda0", "maybe"}).code, 2);
  const Outcome boot = run({"simulate", "--scenario", "folate", "--boot", "20",
                        "--strategies", "CALIBRATED_BIOMARKER", "--out", path("o")});
  EXPECT_EQ(boot.code, 2);
  EXPECT_NE(boot.err.find("--boot"), std::string::npos);
  const Outcome help = run({"--help"});
  EXPECT_EQ(help.code, 0);
  EXPECT_NE(help.out.find("simulate"), std::string::npos);
}

TEST_F(CliTest, SimulateFromScenarioFileWithFixedLambda) {
  {
    std::ofstream f(path("s.txt"));
    f << "base = folate\nn_cohort = 800\nn_substudy = 200\nn_reliability = 40\n"
         "lambda0 = 0.001\n";
  }
  const Outcome r = run({"simulate", "--scenario", path("s.txt"), "--sims", "2",
                     "--strategies", "TRUTH,NAIVE_SELFREPORT", "--lambda0", "scenario",
                     "--quiet", "--out", path("o")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(slurp(path("o/manifest.json")).find("\"lambda0\": 0.001"), std::string::npos);
  EXPECT_EQ(read_csv_file(path("o/metrics.csv")).rows(), 2u);
}

TEST_F(CliTest, GenerateDefaults) {
  ASSERT_EQ(run({"generate", "--scenario", "beta_cryptoxanthin", "--out", path("c.csv")}).code,
            0);
  const Cohort c = read_cohort_csv(path("c.csv"));
  EXPECT_EQ(c.rows.size(), 16415u);
  EXPECT_EQ(c.substudy_size(), 476u);
  EXPECT_EQ(c.reliability_size(), 95u);
  EXPECT_NEAR(c.censoring_fraction(), 0.85, 0.02);
  expect_csv_round_trip(path("c.csv"));
}

TEST_F(CliTest, GenerateOverridesAndHash) {
  ASSERT_EQ(run({"generate", "--scenario", "folate", "--n-cohort", "100", "--seed", "5",
                 "--out", path("a.csv")})
                .code,
            0);
  EXPECT_EQ(read_cohort_csv(path("a.csv")).rows.size(), 100u);
  ASSERT_EQ(run({"generate", "--scenario", "folate", "--n-cohort", "100", "--seed", "5",
                 "--out", path("b.csv")})
                .code,
            0);
  ASSERT_EQ(run({"generate", "--scenario", "folate", "--n-cohort", "100", "--seed", "6",
                 "--out", path("c.csv")})
                .code,
            0);
  EXPECT_EQ(slurp(path("a.csv")), slurp(path("b.csv")));
  EXPECT_NE(slurp(path("a.csv")), slurp(path("c.csv")));
  EXPECT_EQ(run({"generate", "--scenario", "folate", "--n-cohort", "10", "--n-substudy",
                 "20", "--out", path("d.csv")})
                .code,
            2);
}

TEST_F(CliTest, GeneratedCohortIsReplicationZero) {
  ASSERT_EQ(run({"generate", "--scenario", "lycopene", "--seed", "9", "--out", path("c.csv")})
                .code,
            0);
  ASSERT_EQ(run({"simulate", "--scenario", "lycopene", "--seed", "9", "--sims", "1",
                 "--strategies", "TRUTH", "--quiet", "--out", path("s")})
                .code,
            0);
  const Cohort c = read_cohort_csv(path("c.csv"));
  RngStream unused(0, 0);
  const EstimateRecord truth = estimate(Strategy::kTruth, c, EstimatorSettings{}, unused);
  const Table records = read_csv_file(path("s/records.csv"));
  EXPECT_EQ(records.numeric("beta1_hat")[0], truth.beta1_hat);
}

void write_spec(const std::string& file, const std::string& extra = "") {
  std::ofstream f(file);
  f << "subset = in_substudy\nresponse = x_biomarker\nterms = x_star age bmi\n"
       "center.age = 46.1\ncenter.bmi = 29.6\nrepeat_column = x_biomarker_repeat\n"
       "icc = auto\n"
    << extra;
}

TEST_F(CliTest, AnalyzeRecoversTargetR2) {
  ASSERT_EQ(run({"generate", "--scenario", "beta_cryptoxanthin", "--n-substudy", "6000",
                 "--n-reliability", "2000", "--seed", "4", "--out", path("c.csv")})
                .code,
            0);
  write_spec(path("a.spec"),
             "optimism_boot = 20\ngeomean.value = x_biomarker\n"
             "geomean.group = in_reliability\ngeomean.adjusters = age=46.1, bmi=29.6\n");
  const Outcome r = run({"analyze", "--cohort", path("c.csv"), "--spec", path("a.spec"),
                     "--out", path("out")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.err.find("6000 complete cases"), std::string::npos) << r.err;

  const Table r2 = read_csv_file(path("out/r2_family.csv"));
  const auto names = r2.text("measure");
  const auto& values = r2.numeric("value");
  auto value_of = [&](const std::string& m) {
    for (std::size_t i = 0; i < names.size(); ++i) {
      if (names[i] == m) return values[i];
    }
    ADD_FAILURE() << "missing " << m;
    return 0.0;
  };
  // The target is the R^2 of the biomarker prediction model; SE ~ 0.01 here.
  const Scenario sc = build_scenario("beta_cryptoxanthin");
  EXPECT_NEAR(value_of("r2"), sc.r2_target, 0.03);
  const double icc = value_of("icc");
  EXPECT_NEAR(value_of("prentice_r2"), value_of("r2") / icc, 1e-12);
  EXPECT_NEAR(value_of("r2_new_2"), value_of("r2") / (icc + (1 - icc) / 2), 1e-12);

  const Table fit = read_csv_file(path("out/calibration_fit.csv"));
  EXPECT_EQ(fit.text("term")[0], "(Intercept)");
  EXPECT_NEAR(fit.numeric("estimate")[1], sc.alpha[1], 4 * fit.numeric("se")[1]);
  for (const char* f : {"calibration_fit.csv", "r2_family.csv", "stepwise.csv",
                        "geomeans.csv", "duplicates.csv"}) {
    expect_csv_round_trip(dir_ / "out" / f);
  }
  EXPECT_TRUE(fs::exists(dir_ / "out" / "stepwise.txt"));
}

TEST_F(CliTest, AnalyzeMissingColumnNamed) {
  ASSERT_EQ(run({"generate", "--scenario", "folate", "--n-cohort", "300", "--out",
                 path("c.csv")})
                .code,
            0);
  Table t = read_csv_file(path("c.csv"));
  Table no_age;
  for (const auto& name : t.names()) {
    if (name == "age") continue;
    if (t.is_numeric(name)) {
      no_age.add_numeric(name, t.numeric(name));
    } else {
      no_age.add_text(name, t.text(name));
    }
  }
  write_csv_file(path("noage.csv"), no_age);
  write_spec(path("a.spec"));
  const Outcome r = run({"analyze", "--cohort", path("noage.csv"), "--spec", path("a.spec"),
                     "--out", path("out")});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("'age'"), std::string::npos) << r.err;
}

TEST_F(CliTest, AnalyzeBadSpec) {
  ASSERT_EQ(run({"generate", "--scenario", "folate", "--n-cohort", "300", "--out",
                 path("c.csv")})
                .code,
            0);
  write_spec(path("a.spec"), "frobnicate = 1\n");
  const Outcome r = run({"analyze", "--cohort", path("c.csv"), "--spec", path("a.spec"),
                     "--out", path("out")});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("frobnicate"), std::string::npos);
}

TEST_F(CliTest, ExactDuplicatesHaveZeroCv) {
  {
    std::ofstream f(path("pairs.csv"));
    f << "analyte,id,replicate_index,value\n";
    for (int id = 1; id <= 6; ++id) {
      for (int rep = 1; rep <= 2; ++rep) {
        f << "folate," << id << "," << rep << "," << 3 + id << "\n";
        f << "b12," << id << "," << rep << "," << 100 * id << "\n";
      }
    }
  }
  ASSERT_EQ(run({"reliability", "--pairs", path("pairs.csv"), "--out", path("r")}).code, 0);
  const Table d = read_csv_file(path("r/duplicates.csv"));
  ASSERT_EQ(d.rows(), 2u);
  for (double cv : d.numeric("cv")) EXPECT_EQ(cv, 0.0);
  for (double icc : d.numeric("icc")) EXPECT_NEAR(icc, 1.0, 1e-15);
  expect_csv_round_trip(path("r/duplicates.csv"));

  ASSERT_EQ(run({"generate", "--scenario", "folate", "--n-cohort", "400", "--out",
                 path("c.csv")})
                .code,
            0);
  write_spec(path("a.spec"), "duplicates = pairs.csv\nstepwise = false\n");
  ASSERT_EQ(run({"analyze", "--cohort", path("c.csv"), "--spec", path("a.spec"), "--out",
                 path("out")})
                .code,
            0);
  const Table both = read_csv_file(path("out/duplicates.csv"));
  ASSERT_EQ(both.rows(), 3u);
  EXPECT_EQ(both.text("analyte")[0], "x_biomarker");
  EXPECT_EQ(both.numeric("cv")[1], 0.0);
  EXPECT_EQ(both.numeric("cv")[2], 0.0);
}

}  // namespace
}  // namespace regcal
