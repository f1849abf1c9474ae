// Copyright 2026 the rwre-lab authors.
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

#ifndef RWRE_NUMERIC_HPP_
#define RWRE_NUMERIC_HPP_

#include <cmath>
#include <limits>
#include <utility>
#include <vector>

namespace rwre {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();
inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// log(exp(a) + exp(b)) without overflow; handles -inf operands.
inline double logaddexp(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double m = a > b ? a : b;
  return m + std::log1p(std::exp(-(std::fabs(a - b))));
}

/// Max-shifted sum of exponentials of the given logs.
inline double logsumexp(const std::vector<double>& logs) {
  double m = kNegInf;
  for (double v : logs)
    if (v > m) m = v;
  if (m == kNegInf) return kNegInf;
  double acc = 0.0;
  for (double v : logs) acc += std::exp(v - m);
  return m + std::log(acc);
}

/// Gauss-Legendre nodes/weights on [-1,1], Newton on P_n.
inline void gauss_legendre(int n, std::vector<double>& x,
                           std::vector<double>& w) {
  x.assign(n, 0.0);
  w.assign(n, 0.0);
  const int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
      }
      pp = n * (z * p0 - p1) / (z * z - 1.0);
      const double dz = p0 / pp;
      z -= dz;
      if (std::fabs(dz) < 1e-15) break;
    }
    x[i] = -z;
    x[n - 1 - i] = z;
    w[i] = 2.0 / ((1.0 - z * z) * pp * pp);
    w[n - 1 - i] = w[i];
  }
}

/// Solves the tridiagonal system (lower, diag, upper) * v = rhs in place.
/// Thomas algorithm; no pivoting (systems here are diagonally dominant).
inline std::vector<double> solve_tridiagonal(std::vector<double> lower,
                                             std::vector<double> diag,
                                             std::vector<double> upper,
                                             std::vector<double> rhs) {
  const std::size_t n = diag.size();
  for (std::size_t i = 1; i < n; ++i) {
    const double m = lower[i] / diag[i - 1];
    diag[i] -= m * upper[i - 1];
    rhs[i] -= m * rhs[i - 1];
  }
  std::vector<double> v(n);
  v[n - 1] = rhs[n - 1] / diag[n - 1];
  for (std::size_t i = n - 1; i-- > 0;)
    v[i] = (rhs[i] - upper[i] * v[i + 1]) / diag[i];
  return v;
}

/// Adaptive Simpson on [a,b] with absolute tolerance.
template <typename F>
double adaptive_simpson(const F& f, double a, double b, double tol,
                        int max_depth = 50) {
  struct Impl {
    const F& f;
    double recurse(double a, double m, double b, double fa, double fm,
                   double fb, double whole, double tol, int depth) {
      const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
      const double flm = f(lm), frm = f(rm);
      const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
      const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
      const double delta = left + right - whole;
      // inverted comparison so a NaN delta stops the recursion too
      if (depth <= 0 || !(std::fabs(delta) > 15.0 * tol))
        return left + right + delta / 15.0;
      return recurse(a, lm, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
             recurse(m, rm, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
    }
  } impl{f};
  const double m = 0.5 * (a + b);
  const double fa = f(a), fm = f(m), fb = f(b);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return impl.recurse(a, m, b, fa, fm, fb, whole, tol, max_depth);
}

/// Bisection root of f on [lo,hi]; requires a sign change.
template <typename F>
double bisect(const F& f, double lo, double hi, double xtol = 1e-13,
              int max_iter = 200) {
  double flo = f(lo);
  for (int i = 0; i < max_iter && hi - lo > xtol * (1.0 + std::fabs(lo));
       ++i) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if ((flo <= 0.0) == (fm <= 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

struct MeanVar {
  double mean = 0.0;
  double variance = 0.0;
};

/// Welford accumulation.
inline MeanVar mean_variance(const std::vector<double>& xs) {
  MeanVar mv;
  double m = 0.0, m2 = 0.0;
  std::size_t n = 0;
  for (double x : xs) {
    ++n;
    const double d = x - m;
    m += d / static_cast<double>(n);
    m2 += d * (x - m);
  }
  mv.mean = m;
  mv.variance = n > 1 ? m2 / static_cast<double>(n - 1) : 0.0;
  return mv;
}

}  // namespace rwre

#endif  // RWRE_NUMERIC_HPP_
