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

// `analyze` and `reliability`: calibration model, R^2 family, stepwise
// selection, adjusted geometric means and duplicate-pair reliability on an
// ingested table.

#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

#include "cli.h"
#include "commands.h"
#include "regcal/cohort_io.h"
#include "regcal/descriptive.h"
#include "regcal/error.h"
#include "regcal/linmod.h"
#include "regcal/scenario_io.h"
#include "regcal/table.h"

namespace regcal::cli {

namespace {

namespace fs = std::filesystem;

struct AnalysisSpec {
  bool cohort_schema = true;
  std::string subset;
  Design design;
  std::string icc = "auto";
  std::string repeat_column;
  std::vector<int> replicates{2, 4};
  bool stepwise = true;
  std::size_t optimism_boot = 0;
  std::uint64_t seed = 1;
  std::string geomean_value;
  std::string geomean_group;
  std::vector<Adjuster> geomean_adjusters;
  std::string duplicates_file;
  bool pairs_on_log_scale = true;
};

[[noreturn]] void bad(const std::string& message) {
  throw Error(ErrorCode::kInvalidConfig, message);
}

AnalysisSpec read_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot read analysis spec '" + path + "'");
  AnalysisSpec s;
  bool have_response = false, have_terms = false, have_scale = false;
  for (const auto& [key, value] : parse_key_values(in)) {
    if (key == "schema") {
      if (value != "cohort" && value != "free") bad("schema must be 'cohort' or 'free'");
      s.cohort_schema = value == "cohort";
    } else if (key == "subset") {
      s.subset = value;
    } else if (key == "response") {
      s.design.response = value;
      have_response = true;
    } else if (key == "terms") {
      s.design.terms = split_words(value);
      have_terms = true;
    } else if (key.starts_with("center.")) {
      s.design.centers[key.substr(7)] = parse_real(key, value);
    } else if (key == "max_response_missing") {
      s.design.max_response_missing = parse_real(key, value);
    } else if (key == "icc") {
      if (value != "auto") parse_real(key, value);
      s.icc = value;
    } else if (key == "repeat_column") {
      s.repeat_column = value;
    } else if (key == "replicates") {
      s.replicates.clear();
      for (const auto& w : split_words(value)) {
        const std::size_t j = parse_count(key, w);
        if (j < 1) bad("replicates must be >= 1");
        s.replicates.push_back(static_cast<int>(j));
      }
    } else if (key == "stepwise") {
      s.stepwise = parse_bool(key, value);
    } else if (key == "optimism_boot") {
      s.optimism_boot = parse_count(key, value);
    } else if (key == "seed") {
      s.seed = parse_count(key, value);
    } else if (key == "geomean.value") {
      s.geomean_value = value;
    } else if (key == "geomean.group") {
      s.geomean_group = value;
    } else if (key == "geomean.adjusters") {
      for (const auto& w : split_words(value)) {
        const auto eq = w.find('=');
        if (eq == std::string::npos) bad("geomean.adjusters entries must be column=reference");
        s.geomean_adjusters.push_back({w.substr(0, eq), parse_real(key, w.substr(eq + 1))});
      }
    } else if (key == "duplicates") {
      const fs::path p(value);
      s.duplicates_file =
          p.is_absolute() ? value : (fs::path(path).parent_path() / p).string();
    } else if (key == "pairs_scale") {
      if (value != "log" && value != "raw") bad("pairs_scale must be 'log' or 'raw'");
      s.pairs_on_log_scale = value == "log";
      have_scale = true;
    } else {
      bad("unknown analysis key '" + key + "'");
    }
  }
  if (!have_response || !have_terms) bad("analysis spec needs 'response' and 'terms'");
  if (!have_scale) s.pairs_on_log_scale = s.cohort_schema;
  if (s.icc == "auto" && s.repeat_column.empty()) {
    bad("icc = auto needs repeat_column");
  }
  if (s.geomean_value.empty() != s.geomean_group.empty()) {
    bad("geomean.value and geomean.group go together");
  }
  return s;
}

Table restrict_rows(const Table& data, const std::string& subset) {
  if (subset.empty()) return data;
  const auto& flag = data.numeric(subset);
  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < flag.size(); ++i) {
    if (flag[i] == 1.0) keep.push_back(i);
  }
  return data.select_rows(keep);
}

DuplicatePairs pairs_from_columns(const Table& data, const std::string& first,
                                  const std::string& second, bool exponentiate) {
  DuplicatePairs p;
  p.analyte = first;
  const auto& a = data.numeric(first);
  const auto& b = data.numeric(second);
  for (std::size_t i = 0; i < a.size(); ++i) {
    const bool ha = !std::isnan(a[i]), hb = !std::isnan(b[i]);
    if (ha && hb) {
      p.first.push_back(exponentiate ? std::exp(a[i]) : a[i]);
      p.second.push_back(exponentiate ? std::exp(b[i]) : b[i]);
    } else if (ha != hb) {
      ++p.dropped_half_pairs;
    }
  }
  return p;
}

Table duplicates_table(const std::vector<DuplicatePairs>& all, std::ostream& err) {
  std::vector<std::string> analyte;
  std::vector<double> n, icc, cv, dropped;
  for (const auto& p : all) {
    analyte.push_back(p.analyte);
    n.push_back(static_cast<double>(p.size()));
    dropped.push_back(static_cast<double>(p.dropped_half_pairs));
    double r = NAN, c = NAN;
    try {
      r = duplicate_icc(p);
    } catch (const Error& e) {
      err << "  " << p.analyte << ": ICC unavailable (" << e.what() << ")\n";
    }
    try {
      c = duplicate_cv(p);
    } catch (const Error& e) {
      err << "  " << p.analyte << ": CV unavailable (" << e.what() << ")\n";
    }
    icc.push_back(r);
    cv.push_back(c);
  }
  Table t;
  t.add_text("analyte", std::move(analyte));
  t.add_numeric("n_pairs", std::move(n));
  t.add_numeric("icc", std::move(icc));
  t.add_numeric("cv", std::move(cv));
  t.add_numeric("dropped_half_pairs", std::move(dropped));
  return t;
}

Table fit_table(const CalibrationFit& fit) {
  Table t;
  t.add_text("term", fit.term_names);
  t.add_numeric("estimate", fit.coefficients);
  t.add_numeric("se", fit.se);
  return t;
}

Table r2_table(const R2Family& f, std::size_t n_used) {
  std::vector<std::string> measure;
  std::vector<double> value;
  auto add = [&](std::string m, double v) {
    measure.push_back(std::move(m));
    value.push_back(v);
  };
  add("n", static_cast<double>(n_used));
  add("r2", f.r2);
  add("icc", f.icc_used);
  add("prentice_r2", f.prentice_r2);
  for (const auto& [j, v] : f.r2_new) add("r2_new_" + std::to_string(j), v);
  for (const auto& [term, v] : f.partial_r2) add("partial_r2:" + term, v);
  Table t;
  t.add_text("measure", std::move(measure));
  t.add_numeric("value", std::move(value));
  return t;
}

std::string describe_fit(const CalibrationFit& fit, double aic) {
  std::ostringstream s;
  s << "  n = " << fit.n_used << ", R2 = " << format_double(fit.r2)
    << ", AIC = " << format_double(aic) << "\n";
  for (std::size_t k = 0; k < fit.term_names.size(); ++k) {
    s << "    " << fit.term_names[k] << "  " << format_double(fit.coefficients[k])
      << "  (SE " << format_double(fit.se[k]) << ")\n";
  }
  return s.str();
}

void run_stepwise(const Table& data, const AnalysisSpec& spec, const fs::path& dir,
                  std::ostream& err) {
  const StepwiseResult r = stepwise_aic(data, spec.design);
  std::vector<double> step{0.0}, aic{r.full_aic};
  std::vector<std::string> action{"start"}, term{""};
  for (std::size_t k = 0; k < r.steps.size(); ++k) {
    step.push_back(static_cast<double>(k + 1));
    action.emplace_back(r.steps[k].action == StepRecord::Action::kDrop ? "drop" : "add");
    term.push_back(r.steps[k].term);
    aic.push_back(r.steps[k].aic);
  }
  Table t;
  t.add_numeric("step", std::move(step));
  t.add_text("action", std::move(action));
  t.add_text("term", std::move(term));
  t.add_numeric("aic", std::move(aic));
  write_csv_file((dir / "stepwise.csv").string(), t);

  std::ostringstream txt;
  txt << "Stepwise AIC selection for " << spec.design.response << "\n\nFull model\n"
      << describe_fit(r.full, r.full_aic) << "\nSelected model\n"
      << describe_fit(r.selected, r.selected_aic);
  if (spec.optimism_boot > 0) {
    RngStream stream(spec.seed, 0);
    const OptimismResult o =
        optimism_corrected_r2(data, r.selected.design, spec.optimism_boot, stream);
    txt << "\nOptimism (" << o.replicates_used << " bootstrap replicates, "
        << o.replicates_skipped << " skipped)\n  apparent R2 = "
        << format_double(o.apparent_r2) << ", optimism = "
        << format_double(o.mean_optimism) << ", corrected R2 = "
        << format_double(o.corrected_r2) << "\n";
  }
  write_text_file(dir / "stepwise.txt", txt.str());
  err << "  stepwise: " << r.steps.size() << " step(s), "
      << r.selected.design.terms.size() << " term(s) kept\n";
}

void run_geomeans(const Table& data, const AnalysisSpec& spec, const fs::path& dir) {
  const auto rows = adjusted_geomean(data, spec.geomean_value, spec.geomean_adjusters,
                                     spec.geomean_group);
  std::vector<std::string> group;
  std::vector<double> n, gm, lo, hi, plo, phi;
  for (const auto& r : rows) {
    group.push_back(r.group);
    n.push_back(static_cast<double>(r.n));
    gm.push_back(r.geometric_mean);
    lo.push_back(r.ci_low);
    hi.push_back(r.ci_high);
    plo.push_back(r.pct_low);
    phi.push_back(r.pct_high);
  }
  Table t;
  t.add_text("group", std::move(group));
  t.add_numeric("n", std::move(n));
  t.add_numeric("geometric_mean", std::move(gm));
  t.add_numeric("ci_low", std::move(lo));
  t.add_numeric("ci_high", std::move(hi));
  t.add_numeric("pct_2_5", std::move(plo));
  t.add_numeric("pct_97_5", std::move(phi));
  write_csv_file((dir / "geomeans.csv").string(), t);
}

}  // namespace

int cmd_analyze(const AnalyzeOptions& o, std::ostream& out, std::ostream& err) {
  try {
    const AnalysisSpec spec = read_spec(o.spec);
    const Table raw = read_csv_file(o.cohort);
    if (spec.cohort_schema) cohort_from_table(raw);
    const Table data = restrict_rows(raw, spec.subset);
    const fs::path dir = prepare_output_dir(o.out);
    err << "analyze: " << raw.rows() << " rows read";
    if (!spec.subset.empty()) err << ", " << data.rows() << " with " << spec.subset << " = 1";
    err << "\n";

    const CalibrationFit fit = fit_calibration(data, spec.design);
    err << "  calibration fit: " << fit.n_used << " complete cases, " << fit.n_dropped
        << " dropped\n";
    write_csv_file((dir / "calibration_fit.csv").string(), fit_table(fit));

    std::vector<DuplicatePairs> duplicates;
    if (!spec.repeat_column.empty()) {
      duplicates.push_back(pairs_from_columns(data, spec.design.response,
                                              spec.repeat_column, false));
      err << "  duplicate pairs: " << duplicates.back().size() << " complete, "
          << duplicates.back().dropped_half_pairs << " half pairs dropped\n";
    }
    double icc = 1.0;
    if (spec.icc == "auto") {
      icc = duplicate_icc(duplicates.front());
    } else {
      icc = parse_real("icc", spec.icc);
    }
    const R2Family family = r2_family(data, spec.design, icc, spec.replicates);
    write_csv_file((dir / "r2_family.csv").string(), r2_table(family, fit.n_used));

    if (spec.stepwise) run_stepwise(data, spec, dir, err);
    if (!spec.geomean_value.empty()) run_geomeans(data, spec, dir);

    if (!duplicates.empty() && spec.pairs_on_log_scale) {
      // Cohort biomarker columns are logs; CV is reported on the original scale.
      duplicates.front() = pairs_from_columns(data, spec.design.response,
                                              spec.repeat_column, true);
    }
    if (!spec.duplicates_file.empty()) {
      for (auto& p : duplicate_pairs_from_long(read_csv_file(spec.duplicates_file))) {
        duplicates.push_back(std::move(p));
      }
    }
    if (!duplicates.empty()) {
      write_csv_file((dir / "duplicates.csv").string(), duplicates_table(duplicates, err));
    }
    out << "R2 = " << format_double(family.r2) << ", ICC = " << format_double(icc)
        << ", Prentice R2 = " << format_double(family.prentice_r2) << "; tables in "
        << dir.string() << "\n";
    return kExitOk;
  } catch (const Error& e) {
    err << "regcal analyze: " << e.what() << "\n";
    return kExitConfig;
  }
}

int cmd_reliability(const ReliabilityOptions& o, std::ostream& out, std::ostream& err) {
  try {
    const Table data = read_csv_file(o.pairs);
    const fs::path dir = prepare_output_dir(o.out);
    const auto pairs = duplicate_pairs_from_long(data);
    const Table t = duplicates_table(pairs, err);
    write_csv_file((dir / "duplicates.csv").string(), t);
    write_csv(out, t);
    return kExitOk;
  } catch (const Error& e) {
    err << "regcal reliability: " << e.what() << "\n";
    return kExitConfig;
  }
}

}  // namespace regcal::cli
