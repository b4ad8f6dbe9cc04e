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

#ifndef REGCAL_NUMERICS_H_
#define REGCAL_NUMERICS_H_

#include <cstddef>
#include <span>
#include <vector>

#include "regcal/matrix.h"
#include "regcal/rng.h"

namespace regcal {

/// Lower-triangular L with L * L^T == s.
///
/// Throws kNotPositiveDefinite when a pivot falls to or below
/// 1e-12 * max|s|, and kDimensionMismatch for non-square or asymmetric
/// input (relative tolerance 1e-10).
Matrix cholesky(const Matrix& s);

/// Inverse of a symmetric positive-definite matrix via its Cholesky factor.
Matrix invert_spd(const Matrix& s);

/// Solves L * x = b (forward) and L^T * x = b (backward) in place.
void solve_lower(const Matrix& l, std::span<double> b);
void solve_lower_transpose(const Matrix& l, std::span<double> b);

struct LeastSquaresResult {
  std::vector<double> coefficients;
  double rss = 0.0;
  // (X^T X)^-1.
  Matrix unscaled_covariance;
  std::vector<double> residuals;
};

/// Ordinary least squares by Householder QR.
///
/// Requires n >= p (n == p interpolates exactly). Columns whose R diagonal falls below 1e-10 * ||X||_F
/// make the problem kRankDeficient.
LeastSquaresResult solve_least_squares(const Matrix& x,
                                       std::span<const double> y);

/// n rows of mean + L z with z standard normal. Rows are drawn in order,
/// each consuming dim(mean) normals from the stream.
Matrix sample_mvn(std::span<const double> mean, const Matrix& l,
                  std::size_t n, RngStream& stream);

/// Quantile by linear interpolation between order statistics at the
/// 1-based position 1 + (n - 1) p. p = 0 gives the minimum and p = 1 the
/// maximum.
double empirical_quantile(std::span<const double> values, double p);

double mean(std::span<const double> values);
/// Sample variance with n - 1 denominator.
double variance(std::span<const double> values);
double covariance(std::span<const double> a, std::span<const double> b);
double pearson_correlation(std::span<const double> a,
                           std::span<const double> b);

}  // namespace regcal

#endif  // REGCAL_NUMERICS_H_
