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

#ifndef RWRE_ENVIRONMENT_HPP_
#define RWRE_ENVIRONMENT_HPP_

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "rwre/rng.hpp"

namespace rwre {

/// Law of a single site probability omega_0. All support points must lie
/// strictly inside (0,1); the law is "transient right" when E[log rho] < 0
/// with rho = (1-omega)/omega.
class OmegaDistribution {
 public:
  enum class Kind { kTwoPoint, kBeta, kDiscrete };

  /// Default-constructed instances are placeholders; validate() rejects
  /// them until the fields are filled through a factory.
  OmegaDistribution() = default;

  static OmegaDistribution two_point(double omega_a, double omega_b, double q);
  static OmegaDistribution beta(double alpha, double beta);
  static OmegaDistribution discrete(
      std::vector<std::pair<double, double>> atoms);  // (omega, weight)

  Kind kind() const { return kind_; }

  /// Throws std::invalid_argument on malformed parameters.
  void validate() const;

  bool transient_right(double tol = 1e-10) const {
    return mean_log_rho() < -tol;
  }

  double mean_rho() const { return moment_rho(1.0); }
  double mean_log_rho() const;
  /// E_P rho^gamma; +inf for beta when gamma >= alpha.
  double moment_rho(double gamma) const;

  double sample(RngStream& rng) const;

  // parameter accessors (kind-checked)
  double omega_a() const { return a_; }
  double omega_b() const { return b_; }
  double q() const { return q_; }
  double alpha() const { return a_; }
  double beta_param() const { return b_; }
  const std::vector<std::pair<double, double>>& atoms() const {
    return atoms_;
  }

 private:
  Kind kind_ = Kind::kTwoPoint;
  double a_ = 0.0, b_ = 0.0, q_ = 0.0;
  std::vector<std::pair<double, double>> atoms_;
};

/// Realized finite window of site probabilities. Immutable after
/// construction except for tagging reflection sites (omega forced to 1).
class Environment {
 public:
  Environment() = default;
  Environment(std::int64_t left_index, std::vector<double> omegas);

  std::int64_t left_index() const { return left_; }
  std::int64_t right_index() const {
    return left_ + static_cast<std::int64_t>(omegas_.size());
  }  // one past the last site
  std::int64_t length() const {
    return static_cast<std::int64_t>(omegas_.size());
  }
  bool contains(std::int64_t i) const {
    return i >= left_ && i < right_index();
  }

  double omega(std::int64_t i) const {
    check(i);
    return omegas_[static_cast<std::size_t>(i - left_)];
  }
  double omega_unchecked(std::int64_t i) const {
    return omegas_[static_cast<std::size_t>(i - left_)];
  }
  double rho(std::int64_t i) const {
    const double w = omega(i);
    return (1.0 - w) / w;
  }
  double log_rho(std::int64_t i) const;

  /// Tags a reflection site: omega_i := 1 (rho_i = 0).
  void set_reflection(std::int64_t i);
  bool is_reflection(std::int64_t i) const { return omega(i) == 1.0; }

  const std::vector<double>& omegas() const { return omegas_; }

  void save(std::ostream& os) const;
  static Environment load(std::istream& is);

 private:
  void check(std::int64_t i) const {
    if (!contains(i))
      throw std::out_of_range("site " + std::to_string(i) +
                              " outside environment window [" +
                              std::to_string(left_) + "," +
                              std::to_string(right_index()) + ")");
  }
  std::int64_t left_ = 0;
  std::vector<double> omegas_;
};

/// Ladder locations nu_i (nu[0] = 0) with per-block maximum prefix product
/// M_i and block lengths.
struct LadderDecomposition {
  std::vector<std::int64_t> nu;       // nu[0] = 0, strictly increasing
  std::vector<double> block_max;      // block_max[i-1] = M_i
  std::vector<std::int64_t> block_len;

  std::int64_t n_blocks() const {
    return static_cast<std::int64_t>(nu.size()) - 1;
  }
};

/// Thrown when the environment window ends before the requested number of
/// ladder blocks was found; carries the blocks found so far.
class PartialLadderError : public std::runtime_error {
 public:
  PartialLadderError(std::string msg, LadderDecomposition found)
      : std::runtime_error(std::move(msg)), found(std::move(found)) {}
  LadderDecomposition found;
};

/// Thrown by sample_Q_blocks when a block exceeds the hard length cap.
class RunawayBlockError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct StabilityParams {
  double s = 0.0;         // root of E_P rho^s = 1
  double v_P = 0.0;       // speed, 0 unless E_P rho < 1
  double E_rho = 0.0;
  double E_log_rho = 0.0;
};

/// i.i.d. environment on [lo, hi]; deterministic given seed.
Environment sample_environment(const OmegaDistribution& dist, std::int64_t lo,
                               std::int64_t hi, std::uint64_t seed,
                               double ellipticity_floor = 1e-9);

double rho(const Environment& env, std::int64_t i);

/// log Pi_{i,j} = sum_{k=i}^{j} log rho_k. Throws std::invalid_argument for
/// i > j (callers must handle the empty product Pi = 1 themselves).
double log_pi(const Environment& env, std::int64_t i, std::int64_t j);
double pi(const Environment& env, std::int64_t i, std::int64_t j);

/// W_{i,j} = sum_{k=i}^{j} Pi_{k,j}, accumulated in log domain.
double w_sum(const Environment& env, std::int64_t i, std::int64_t j);
double log_w_sum(const Environment& env, std::int64_t i, std::int64_t j);

/// W_j of the environment reflected at `cutoff` (rho_cutoff := 0), i.e.
/// W_{cutoff+1, j}; zero when cutoff == j.
double w_tail(const Environment& env, std::int64_t j, std::int64_t cutoff);

/// First max_blocks ladder locations of an environment window starting at 0.
LadderDecomposition ladder_locations(const Environment& env,
                                     std::int64_t max_blocks);

struct QEnvironment {
  Environment env;             // sites [0, nu_n)
  LadderDecomposition ladder;  // n blocks
};

/// Concatenation of n_blocks i.i.d. P-blocks (sample sites until the first
/// ladder index, cut, repeat): a Q-environment restricted to nonnegative
/// sites. Deterministic given seed.
QEnvironment sample_Q_blocks(const OmegaDistribution& dist,
                             std::int64_t n_blocks, std::uint64_t seed,
                             std::int64_t block_cap = 100000,
                             double ellipticity_floor = 1e-9);

/// Solves E_P rho^s = 1 for the nonzero root s; fills the speed v_P when
/// E_P rho < 1. Throws std::domain_error when no root exists in (0, 64].
StabilityParams solve_s(const OmegaDistribution& dist);

}  // namespace rwre

#endif  // RWRE_ENVIRONMENT_HPP_
