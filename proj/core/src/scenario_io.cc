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

#include "regcal/scenario_io.h"

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "regcal/error.h"
#include "regcal/table.h"

namespace regcal {
namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

[[noreturn]] void bad(const std::string& message) {
  throw Error(ErrorCode::kInvalidConfig, message);
}

double parse_number(std::string_view token, const std::string& context) {
  double v = 0.0;
  const auto* end = token.data() + token.size();
  auto [ptr, ec] = std::from_chars(token.data(), end, v);
  if (ec != std::errc() || ptr != end) {
    bad("'" + std::string(token) + "' is not a number in " + context);
  }
  return v;
}

std::size_t parse_count(const std::string& value, const std::string& key) {
  const double v = parse_number(value, key);
  if (v < 0 || v != static_cast<double>(static_cast<std::size_t>(v))) {
    bad(key + " must be a non-negative integer");
  }
  return static_cast<std::size_t>(v);
}

template <std::size_t N>
std::array<double, N> fixed_list(const std::string& value, const std::string& key) {
  const auto list = parse_number_list(value);
  if (list.size() != N) {
    bad(key + " needs " + std::to_string(N) + " values, got " +
        std::to_string(list.size()));
  }
  std::array<double, N> out{};
  std::copy(list.begin(), list.end(), out.begin());
  return out;
}

template <std::size_t N>
std::string format_list(const std::array<double, N>& values) {
  std::string s = "[";
  for (std::size_t i = 0; i < N; ++i) {
    if (i) s += ' ';
    s += format_double(values[i]);
  }
  return s + "]";
}

}  // namespace

KeyValues parse_key_values(std::istream& in) {
  KeyValues out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      bad("line " + std::to_string(line_no) + ": expected key = value");
    }
    std::string key = trim(std::string_view(line).substr(0, eq));
    std::string value = trim(std::string_view(line).substr(eq + 1));
    if (key.empty()) bad("line " + std::to_string(line_no) + ": empty key");
    // Bracketed values may continue until the closing bracket.
    if (!value.empty() && value.front() == '[') {
      while (value.find(']') == std::string::npos) {
        std::string more;
        if (!std::getline(in, more)) bad("unterminated '[' for key " + key);
        ++line_no;
        if (const auto hash = more.find('#'); hash != std::string::npos) more.erase(hash);
        value += ' ' + trim(more);
      }
    }
    for (const auto& [k, v] : out) {
      if (k == key) bad("duplicate key " + key);
    }
    out.emplace_back(std::move(key), std::move(value));
  }
  return out;
}

std::vector<std::vector<double>> parse_number_rows(const std::string& text) {
  std::string body = trim(text);
  if (body.size() < 2 || body.front() != '[' || body.back() != ']') {
    bad("expected a bracketed list, got '" + body + "'");
  }
  body = body.substr(1, body.size() - 2);
  std::vector<std::vector<double>> rows;
  std::stringstream row_stream(body);
  std::string row_text;
  while (std::getline(row_stream, row_text, ';')) {
    std::replace(row_text.begin(), row_text.end(), ',', ' ');
    std::istringstream tokens(row_text);
    std::vector<double> row;
    std::string token;
    while (tokens >> token) row.push_back(parse_number(token, "'" + text + "'"));
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<double> parse_number_list(const std::string& text) {
  auto rows = parse_number_rows(text);
  if (rows.size() != 1) bad("expected a single row in '" + text + "'");
  return rows.front();
}

Matrix parse_matrix(const std::string& text) {
  const auto rows = parse_number_rows(text);
  const std::size_t cols = rows.empty() ? 0 : rows.front().size();
  Matrix m(rows.size(), cols);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != cols) bad("ragged matrix literal '" + text + "'");
    for (std::size_t j = 0; j < cols; ++j) m(i, j) = rows[i][j];
  }
  return m;
}

Beta1Source parse_beta1_source(const std::string& text) {
  if (text == "generating") return Beta1Source::kGenerating;
  if (text == "nominal") return Beta1Source::kNominal;
  bad("beta1_source must be 'generating' or 'nominal', got '" + text + "'");
}

Scenario parse_scenario(const KeyValues& entries) {
  Scenario s;
  Beta1Source source = Beta1Source::kGenerating;
  std::string base;
  for (const auto& [k, v] : entries) {
    if (k == "base") base = v;
    if (k == "beta1_source") source = parse_beta1_source(v);
  }
  if (!base.empty()) {
    s = build_scenario(base, source);
  } else {
    s.name = "custom";
  }
  for (const auto& [key, value] : entries) {
    if (key == "base") {
      continue;
    } else if (key == "beta1_source") {
      if (base.empty()) bad("beta1_source needs a built-in base scenario");
    } else if (key == "name") {
      s.name = value;
    } else if (key == "n_cohort") {
      s.n_cohort = parse_count(value, key);
    } else if (key == "n_substudy") {
      s.n_substudy = parse_count(value, key);
    } else if (key == "n_reliability") {
      s.n_reliability = parse_count(value, key);
    } else if (key == "mvn_mean") {
      s.mvn_mean = fixed_list<3>(value, key);
    } else if (key == "mvn_cov") {
      s.mvn_cov = parse_matrix(value);
    } else if (key == "alpha") {
      s.alpha = fixed_list<4>(value, key);
    } else if (key == "r2_target") {
      s.r2_target = parse_number(value, key);
    } else if (key == "sigma_eps2") {
      s.sigma_eps2 = parse_number(value, key);
    } else if (key == "beta") {
      s.beta = fixed_list<3>(value, key);
    } else if (key == "beta1") {
      s.beta[0] = parse_number(value, key);
    } else if (key == "lambda0") {
      s.lambda0 = parse_number(value, key);
    } else if (key == "censor_time") {
      s.censor_time = parse_number(value, key);
    } else if (key == "age_center") {
      s.age_center = parse_number(value, key);
    } else if (key == "bmi_center") {
      s.bmi_center = parse_number(value, key);
    } else {
      bad("unknown scenario key '" + key + "'");
    }
  }
  validate(s);
  return s;
}

Scenario parse_scenario(std::istream& in) { return parse_scenario(parse_key_values(in)); }

std::string format_scenario(const Scenario& s) {
  std::ostringstream out;
  out << "name = " << s.name << '\n'
      << "n_cohort = " << s.n_cohort << '\n'
      << "n_substudy = " << s.n_substudy << '\n'
      << "n_reliability = " << s.n_reliability << '\n'
      << "mvn_mean = " << format_list(s.mvn_mean) << '\n'
      << "mvn_cov = [";
  for (std::size_t i = 0; i < s.mvn_cov.rows(); ++i) {
    if (i) out << "; ";
    for (std::size_t j = 0; j < s.mvn_cov.cols(); ++j) {
      if (j) out << ' ';
      out << format_double(s.mvn_cov(i, j));
    }
  }
  out << "]\n"
      << "alpha = " << format_list(s.alpha) << '\n'
      << "r2_target = " << format_double(s.r2_target) << '\n'
      << "sigma_eps2 = " << format_double(s.sigma_eps2) << '\n'
      << "beta = " << format_list(s.beta) << '\n'
      << "lambda0 = " << format_double(s.lambda0) << '\n'
      << "censor_time = " << format_double(s.censor_time) << '\n'
      << "age_center = " << format_double(s.age_center) << '\n'
      << "bmi_center = " << format_double(s.bmi_center) << '\n';
  return out.str();
}

Scenario load_scenario(const std::string& name_or_path, Beta1Source beta1) {
  const auto names = builtin_scenario_names();
  if (std::find(names.begin(), names.end(), name_or_path) != names.end()) {
    return build_scenario(name_or_path, beta1);
  }
  std::error_code ec;
  if (!std::filesystem::is_regular_file(name_or_path, ec)) {
    throw Error(ErrorCode::kUnknownScenario,
                "unknown scenario '" + name_or_path +
                    "' (not a built-in name or a readable file)");
  }
  std::ifstream in(name_or_path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + name_or_path);
  return parse_scenario(in);
}

}  // namespace regcal
