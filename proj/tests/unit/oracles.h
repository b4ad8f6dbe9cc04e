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

// Independent reference computations shared by the unit tests. None of
// these call into the library, so agreement is a genuine cross-check.

#ifndef REGCAL_TESTS_ORACLES_H_
#define REGCAL_TESTS_ORACLES_H_

#include <cmath>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <vector>

namespace oracle {

using Dense = std::vector<std::vector<double>>;

// Gauss-Jordan inverse with partial pivoting.
inline Dense invert(Dense a) {
  const std::size_t n = a.size();
  Dense inv(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) inv[i][i] = 1.0;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r) {
      if (std::fabs(a[r][c]) > std::fabs(a[piv][c])) piv = r;
    }
    if (a[piv][c] == 0.0) throw std::runtime_error("singular");
    std::swap(a[c], a[piv]);
    std::swap(inv[c], inv[piv]);
    const double d = a[c][c];
    for (std::size_t j = 0; j < n; ++j) {
      a[c][j] /= d;
      inv[c][j] /= d;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == c) continue;
      const double f = a[r][c];
      for (std::size_t j = 0; j < n; ++j) {
        a[r][j] -= f * a[c][j];
        inv[r][j] -= f * inv[c][j];
      }
    }
  }
  return inv;
}

// (X'X)^-1 X'y with the explicit inverse.
inline std::vector<double> normal_equations(const Dense& x,
                                            const std::vector<double>& y) {
  const std::size_t p = x.front().size();
  Dense xtx(p, std::vector<double>(p, 0.0));
  std::vector<double> xty(p, 0.0);
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (std::size_t a = 0; a < p; ++a) {
      xty[a] += x[i][a] * y[i];
      for (std::size_t b = 0; b < p; ++b) xtx[a][b] += x[i][a] * x[i][b];
    }
  }
  const Dense inv = invert(xtx);
  std::vector<double> beta(p, 0.0);
  for (std::size_t a = 0; a < p; ++a) {
    for (std::size_t b = 0; b < p; ++b) beta[a] += inv[a][b] * xty[b];
  }
  return beta;
}

inline double rss(const Dense& x, const std::vector<double>& y,
                  const std::vector<double>& beta) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double fit = 0.0;
    for (std::size_t a = 0; a < beta.size(); ++a) fit += x[i][a] * beta[a];
    s += (y[i] - fit) * (y[i] - fit);
  }
  return s;
}

// Golden-section maximiser of a unimodal function on [lo, hi].
inline double golden_max(const std::function<double(double)>& f, double lo,
                         double hi, double tol = 1e-10) {
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - g * (b - a), d = a + g * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > tol) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - g * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + g * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

// Breslow log partial likelihood by brute force over explicit risk sets.
inline double cox_loglik(const std::vector<double>& beta, const Dense& z,
                         const std::vector<double>& times,
                         const std::vector<int>& events) {
  double ll = 0.0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (!events[i]) continue;
    double eta_i = 0.0;
    for (std::size_t k = 0; k < beta.size(); ++k) eta_i += beta[k] * z[i][k];
    double denom = 0.0;
    for (std::size_t j = 0; j < times.size(); ++j) {
      if (times[j] < times[i]) continue;
      double eta = 0.0;
      for (std::size_t k = 0; k < beta.size(); ++k) eta += beta[k] * z[j][k];
      denom += std::exp(eta);
    }
    ll += eta_i - std::log(denom);
  }
  return ll;
}

}  // namespace oracle

#endif  // REGCAL_TESTS_ORACLES_H_
