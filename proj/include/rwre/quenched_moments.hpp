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

#ifndef RWRE_QUENCHED_MOMENTS_HPP_
#define RWRE_QUENCHED_MOMENTS_HPP_

#include <cstdint>
#include <iosfwd>

#include "rwre/environment.hpp"

namespace rwre {

/// How far the walk is allowed to backtrack. `blocks(b)`: while crossing
/// ladder block i the site nu_{i-b} reflects (forced step right).
/// `distance(b)`: while crossing site j -> j+1 the site j+1-b reflects.
/// `none`: no reflection; exact quantities are truncated at the window edge.
struct ReflectionPolicy {
  enum class Kind { kNone, kBlocks, kDistance };
  Kind kind = Kind::kNone;
  std::int64_t b = 0;

  static ReflectionPolicy none() { return {Kind::kNone, 0}; }
  static ReflectionPolicy blocks(std::int64_t b) {
    if (b < 1) throw std::invalid_argument("blocks(b) requires b >= 1");
    return {Kind::kBlocks, b};
  }
  static ReflectionPolicy distance(std::int64_t b) {
    if (b < 1) throw std::invalid_argument("distance(b) requires b >= 1");
    return {Kind::kDistance, b};
  }
};

/// Exact quenched moments of one block crossing under a reflection policy.
struct BlockMoments {
  std::int64_t block_index = 0;
  std::int64_t nu_len = 0;
  double M = 0.0;          // max prefix product within the block
  double mu = 0.0;         // E_omega of the reflected crossing time
  double sigma2 = 0.0;     // Var_omega of the reflected crossing time
  double p_success = 0.0;  // P_omega(T_nu < T_0^+)
  double E_S = 0.0;        // mean success-excursion time
  double m_minus = 1.0;
  double m_plus = 1.0;
};

struct CrossingMoments {
  double mean = 0.0;
  double variance = 0.0;
};

/// Active reflection site for the step j -> j+1 under `refl`. The ladder is
/// required for the blocks policy; block indices below the ladder clamp to
/// the window's left edge.
std::int64_t cutoff_for_step(const Environment& env,
                             const LadderDecomposition* ladder,
                             std::int64_t j, ReflectionPolicy refl);

/// Exact mean and variance of the crossing from..to with a fixed cutoff
/// site (rho_cutoff := 0). Single streaming pass; the nested variance sum
/// is carried by the running accumulator A_j = rho_j (A_{j-1} + W_{j-1} +
/// W_{j-1}^2).
CrossingMoments crossing_moments_with_cutoff(const Environment& env,
                                             std::int64_t from,
                                             std::int64_t to,
                                             std::int64_t cutoff);

double expected_crossing(const Environment& env, std::int64_t from,
                         std::int64_t to, ReflectionPolicy refl,
                         const LadderDecomposition* ladder = nullptr);

double variance_crossing(const Environment& env, std::int64_t from,
                         std::int64_t to, ReflectionPolicy refl,
                         const LadderDecomposition* ladder = nullptr);

/// Independent ground truth: first-step-analysis tridiagonal systems for
/// E[T] and E[T^2] of the birth-death chain reflected at reflect_at and
/// absorbed at absorb_at.
CrossingMoments oracle_moments(const Environment& env, std::int64_t absorb_at,
                               std::int64_t reflect_at, std::int64_t start);

/// P(hit `hi` before `lo` | start), by the same tridiagonal route.
double oracle_hitting_prob(const Environment& env, std::int64_t lo,
                           std::int64_t hi, std::int64_t start);

/// p_omega = P_omega(T_nu < T_0^+) for the block [block_start,
/// block_start+nu_len); log-domain R ratios.
double success_probability(const Environment& env, std::int64_t block_start,
                           std::int64_t nu_len);

/// Environment of the walk conditioned to cross the block without returning
/// to its left edge: omega_bar_0 = omega_bar_1 = 1, the rest per the R
/// ratios. Result lives on [0, nu_len).
Environment conditioned_environment(const Environment& env,
                                    std::int64_t block_start,
                                    std::int64_t nu_len);

/// E_omega S = E_{omega_bar} T_nu, exact.
double expected_success_time(const Environment& env, std::int64_t block_start,
                             std::int64_t nu_len);

struct MExtremes {
  double m_minus = 1.0;  // min interior product before tau, capped at 1
  double m_plus = 1.0;   // max interior product after tau, floored at 1
  std::int64_t tau = 1;  // last prefix index attaining M_1
};

MExtremes m_extremes(const Environment& env, std::int64_t block_start,
                     std::int64_t nu_len);

struct LaplaceBounds {
  double lower = 1.0;
  double upper = 1.0;  // +inf when the quadratic denominator is <= 0
};

/// Sandwich for E_omega exp(-lambda T / mu) from exact block moments.
LaplaceBounds laplace_bounds(const BlockMoments& bm, double lambda);

/// All exact moments of ladder block i (1-based) under `refl`.
BlockMoments block_moments(const Environment& env,
                           const LadderDecomposition& ladder, std::int64_t i,
                           ReflectionPolicy refl);

/// v over the block window (i_lo, i_hi]: sum of exact reflected block
/// variances, all at the same reflection scale.
double sum_block_variances(const Environment& env,
                           const LadderDecomposition& ladder,
                           std::int64_t i_lo, std::int64_t i_hi,
                           std::int64_t backtrack_blocks);

void write_block_moments_csv_header(std::ostream& os);
void write_block_moments_csv_row(std::ostream& os, const BlockMoments& bm);

}  // namespace rwre

#endif  // RWRE_QUENCHED_MOMENTS_HPP_
