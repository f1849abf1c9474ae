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

#ifndef RWRE_LIMIT_LAWS_HPP_
#define RWRE_LIMIT_LAWS_HPP_

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "rwre/environment.hpp"

namespace rwre {

/// Right-continuous empirical CDF over a sorted copy of the samples.
class EmpiricalCDF {
 public:
  explicit EmpiricalCDF(std::vector<double> samples);
  double operator()(double x) const;
  const std::vector<double>& sorted() const { return sorted_; }
  std::size_t size() const { return sorted_.size(); }

 private:
  std::vector<double> sorted_;
};

/// Totally skewed stable law with characteristic function
/// exp{-b |t|^index (1 - i sgn(t) tan(pi index / 2))}.
struct StableSpec {
  double index = 0.0;  // in (0,2), != 1
  double b = 1.0;      // positive scale
};

/// Standard normal CDF via erfc; abs error < 1e-12.
double normal_cdf(double x);

/// Exp(1) CDF and its unit left shift Psi(x + 1).
double exp_cdf(double x);
double shifted_exp_cdf(double x);

/// Stable CDF. index < 1: smooth positive-stable integral representation
/// (no oscillation); index > 1: Gil-Pelaez inversion with tail asymptotics
/// beyond ~30 scale units. Target abs error 1e-6.
double stable_cdf(const StableSpec& spec, double x);

/// Inverse of stable_cdf by bisection; p in (0,1).
double stable_quantile(const StableSpec& spec, double p);

/// Scale fitted by matching an upper-quantile of the sample to the unit-scale
/// law (the scale b enters as a pure b^(1/index) dilation). An upper quantile
/// is used because the fully skewed law has a negative median for index > 1.
double fit_stable_b(double index, const std::vector<double>& samples);

/// sup_x |F_hat(x) - F(x)| by the sorted sweep.
double ks_distance(const EmpiricalCDF& ecdf,
                   const std::function<double(double)>& cdf);

double two_sample_ks(const std::vector<double>& a,
                     const std::vector<double>& b);

/// (1/k sum_{i=1}^{k} log(X_(n-i+1) / X_(n-k)))^(-1); positive samples.
double hill_estimator(std::vector<double> samples, std::size_t k);

/// Shared result shape for the statistical experiment drivers.
struct VerificationReport {
  std::string experiment;
  std::int64_t n_samples = 0;
  double ks = 0.0;
  double hill = 0.0;
  double fitted_b = 0.0;     // quantile-matched scale
  double fitted_b_ks = 0.0;  // KS-minimizing scale (variance-stable only)
  double censored_rate = 0.0;
  std::uint64_t seed = 0;
  std::vector<double> samples;  // the normalized statistic, one per sample
};

/// Samples Q-blocks until `n_qualifying` with M_1 > n^((1-eps)/s) are found,
/// simulates the reflected crossing of each (with b_n fresh context blocks
/// on the left) `paths` times, and reports KS of pooled T/mu against Exp(1).
VerificationReport verify_block_exponential(const OmegaDistribution& dist,
                                            double eps, std::int64_t n,
                                            std::int64_t n_qualifying,
                                            std::int64_t paths,
                                            std::uint64_t seed,
                                            std::int64_t max_steps =
                                                200'000'000);

/// Over `reps` Q-environments of n blocks: exact reflected Var_omega T at
/// depth floor(log^2 n), normalized by n^(2/s). Reports the Hill index of
/// the sample (target s/2) and KS against the median-fitted stable CDF.
VerificationReport verify_variance_stable(const OmegaDistribution& dist,
                                          std::int64_t n, std::int64_t reps,
                                          std::uint64_t seed,
                                          std::size_t hill_k = 0);

}  // namespace rwre

#endif  // RWRE_LIMIT_LAWS_HPP_
