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

#include "regcal/numerics.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "regcal/error.h"

namespace regcal {

Matrix cholesky(const Matrix& s) {
  const std::size_t n = s.rows();
  if (s.cols() != n) {
    throw Error(ErrorCode::kDimensionMismatch, "cholesky needs a square matrix");
  }
  const double scale = s.max_abs();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < i; ++j)
      if (std::abs(s(i, j) - s(j, i)) > 1e-10 * std::max(scale, 1e-300)) {
        throw Error(ErrorCode::kDimensionMismatch,
                    "cholesky input is not symmetric");
      }

  const double pivot_floor = 1e-12 * scale;
  Matrix l(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    double d = s(j, j);
    for (std::size_t k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
    if (!(d > pivot_floor)) {
      throw Error(ErrorCode::kNotPositiveDefinite,
                  "pivot " + std::to_string(j) + " is " + std::to_string(d));
    }
    const double ljj = std::sqrt(d);
    l(j, j) = ljj;
    for (std::size_t i = j + 1; i < n; ++i) {
      double v = s(i, j);
      for (std::size_t k = 0; k < j; ++k) v -= l(i, k) * l(j, k);
      l(i, j) = v / ljj;
    }
  }
  return l;
}

void solve_lower(const Matrix& l, std::span<double> b) {
  const std::size_t n = l.rows();
  for (std::size_t i = 0; i < n; ++i) {
    double v = b[i];
    for (std::size_t k = 0; k < i; ++k) v -= l(i, k) * b[k];
    b[i] = v / l(i, i);
  }
}

void solve_lower_transpose(const Matrix& l, std::span<double> b) {
  const std::size_t n = l.rows();
  for (std::size_t ii = n; ii-- > 0;) {
    double v = b[ii];
    for (std::size_t k = ii + 1; k < n; ++k) v -= l(k, ii) * b[k];
    b[ii] = v / l(ii, ii);
  }
}

Matrix invert_spd(const Matrix& s) {
  const Matrix l = cholesky(s);
  const std::size_t n = s.rows();
  Matrix inv(n, n);
  std::vector<double> e(n);
  for (std::size_t j = 0; j < n; ++j) {
    std::fill(e.begin(), e.end(), 0.0);
    e[j] = 1.0;
    solve_lower(l, e);
    solve_lower_transpose(l, e);
    for (std::size_t i = 0; i < n; ++i) inv(i, j) = e[i];
  }
  // Symmetrize away round-off.
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < i; ++j) {
      const double avg = 0.5 * (inv(i, j) + inv(j, i));
      inv(i, j) = avg;
      inv(j, i) = avg;
    }
  return inv;
}

LeastSquaresResult solve_least_squares(const Matrix& x,
                                       std::span<const double> y) {
  const std::size_t n = x.rows();
  const std::size_t p = x.cols();
  if (y.size() != n) {
    throw Error(ErrorCode::kDimensionMismatch, "response length");
  }
  if (n < p || p == 0) {
    throw Error(ErrorCode::kTooFewRows,
                "least squares needs at least as many rows as columns");
  }

  double frobenius = 0.0;
  for (double v : x.values()) frobenius += v * v;
  frobenius = std::sqrt(frobenius);
  const double rank_tol = 1e-10 * frobenius;

  // Householder QR, column-major working copy for locality.
  std::vector<std::vector<double>> a(p, std::vector<double>(n));
  for (std::size_t j = 0; j < p; ++j)
    for (std::size_t i = 0; i < n; ++i) a[j][i] = x(i, j);
  std::vector<double> qty(y.begin(), y.end());
  std::vector<double> diag(p);

  for (std::size_t k = 0; k < p; ++k) {
    auto& col = a[k];
    double norm = 0.0;
    for (std::size_t i = k; i < n; ++i) norm += col[i] * col[i];
    norm = std::sqrt(norm);
    if (norm <= rank_tol) {
      throw Error(ErrorCode::kRankDeficient,
                  "design column " + std::to_string(k) +
                      " is (numerically) a combination of earlier columns");
    }
    const double alpha = col[k] > 0 ? -norm : norm;
    // v = col[k:] - alpha e1, stored in place.
    col[k] -= alpha;
    double vnorm2 = 0.0;
    for (std::size_t i = k; i < n; ++i) vnorm2 += col[i] * col[i];
    auto reflect = [&](std::vector<double>& target) {
      double dot = 0.0;
      for (std::size_t i = k; i < n; ++i) dot += col[i] * target[i];
      const double f = 2.0 * dot / vnorm2;
      for (std::size_t i = k; i < n; ++i) target[i] -= f * col[i];
    };
    for (std::size_t j = k + 1; j < p; ++j) reflect(a[j]);
    reflect(qty);
    diag[k] = alpha;
  }

  // R is upper triangular: R(k,k) = diag[k], R(k,j) = a[j][k] for j > k.
  auto r_at = [&](std::size_t i, std::size_t j) {
    return i == j ? diag[i] : a[j][i];
  };

  LeastSquaresResult out;
  out.coefficients.assign(p, 0.0);
  for (std::size_t ii = p; ii-- > 0;) {
    double v = qty[ii];
    for (std::size_t j = ii + 1; j < p; ++j) v -= r_at(ii, j) * out.coefficients[j];
    out.coefficients[ii] = v / diag[ii];
  }

  // R^-1 by back substitution, then (X^T X)^-1 = R^-1 R^-T.
  Matrix rinv(p, p);
  for (std::size_t c = 0; c < p; ++c) {
    for (std::size_t ii = c + 1; ii-- > 0;) {
      double v = (ii == c) ? 1.0 : 0.0;
      for (std::size_t j = ii + 1; j <= c; ++j) v -= r_at(ii, j) * rinv(j, c);
      rinv(ii, c) = v / diag[ii];
    }
  }
  out.unscaled_covariance = Matrix(p, p);
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = 0; j <= i; ++j) {
      double s = 0.0;
      for (std::size_t k = std::max(i, j); k < p; ++k) s += rinv(i, k) * rinv(j, k);
      out.unscaled_covariance(i, j) = s;
      out.unscaled_covariance(j, i) = s;
    }

  out.residuals.resize(n);
  double rss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double fitted = 0.0;
    for (std::size_t j = 0; j < p; ++j) fitted += x(i, j) * out.coefficients[j];
    out.residuals[i] = y[i] - fitted;
    rss += out.residuals[i] * out.residuals[i];
  }
  out.rss = rss;
  return out;
}

Matrix sample_mvn(std::span<const double> mean, const Matrix& l,
                  std::size_t n, RngStream& stream) {
  const std::size_t p = mean.size();
  if (l.rows() != p || l.cols() != p) {
    throw Error(ErrorCode::kDimensionMismatch,
                "mean and Cholesky factor disagree in dimension");
  }
  Matrix out(n, p);
  std::vector<double> z(p);
  for (std::size_t r = 0; r < n; ++r) {
    for (auto& v : z) v = stream.normal();
    auto row = out.row(r);
    for (std::size_t i = 0; i < p; ++i) {
      double v = mean[i];
      for (std::size_t k = 0; k <= i; ++k) v += l(i, k) * z[k];
      row[i] = v;
    }
  }
  return out;
}

double empirical_quantile(std::span<const double> values, double p) {
  if (values.empty()) {
    throw Error(ErrorCode::kEmptyInput, "quantile of an empty sample");
  }
  if (!(p >= 0.0 && p <= 1.0)) {
    throw Error(ErrorCode::kInvalidConfig, "quantile probability outside [0,1]");
  }
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const double pos = p * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  if (frac == 0.0) return sorted[lo];
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

double mean(std::span<const double> values) {
  if (values.empty()) throw Error(ErrorCode::kEmptyInput, "mean of nothing");
  double s = 0.0;
  for (double v : values) s += v;
  return s / static_cast<double>(values.size());
}

double covariance(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "covariance lengths differ");
  }
  if (a.size() < 2) {
    throw Error(ErrorCode::kEmptyInput, "covariance needs two observations");
  }
  const double ma = mean(a);
  const double mb = mean(b);
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - ma) * (b[i] - mb);
  return s / static_cast<double>(a.size() - 1);
}

double variance(std::span<const double> values) {
  return covariance(values, values);
}

double pearson_correlation(std::span<const double> a,
                           std::span<const double> b) {
  const double va = variance(a);
  const double vb = variance(b);
  if (!(va > 0.0) || !(vb > 0.0)) {
    throw Error(ErrorCode::kDegenerateVariance,
                "correlation undefined for a constant series");
  }
  return covariance(a, b) / std::sqrt(va * vb);
}

}  // namespace regcal
