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

#ifndef RWRE_SUBSEQUENCE_HPP_
#define RWRE_SUBSEQUENCE_HPP_

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "rwre/environment.hpp"
#include "rwre/quenched_moments.hpp"

namespace rwre {

/// Scales at which the environment is probed. The first scales follow
/// n_k = 2^(2^k); past k = 4 that is not desk-computable and the ladder
/// continues geometrically, n_k = n_{k-1}^(1+delta), clamped at `cap`.
struct ScaleLadder {
  std::vector<std::int64_t> n;  // n[k-1] = n_k, strictly increasing
  std::vector<std::int64_t> d;  // d_k = n_k - n_{k-1} (n_0 = 0)
  std::vector<std::int64_t> b;  // backtrack depth floor(log^2 d_k), >= 1
  std::vector<std::int64_t> a;  // floor(log log k) v 1

  static ScaleLadder make(int k_max, double delta = 1.0,
                          std::int64_t cap = 1 << 20);

  int n_scales() const { return static_cast<int>(n.size()); }
};

struct EventReport {
  enum class Kind { kGaussian, kExponential };
  std::int64_t k = 0;
  Kind kind = Kind::kExponential;
  std::int64_t witness = 0;  // block index; exponential: the dominant block
  double margin = 0.0;       // how strongly the defining inequality held
  std::int64_t n_k = 0;
  std::int64_t d_k = 0;
  double s = 0.0;
};

/// First block i within the first eta-fraction of the window whose M_i^2
/// dominates C times the total crossing variance of the other blocks.
/// `moments` covers the blocks of one scale window in order; the returned
/// witness is 1-based within the window.
std::optional<EventReport> detect_exponential_event(
    const std::vector<BlockMoments>& moments, double C, double eta);

/// Checks that the first eta-fraction of the window carries at least `a`
/// crossing means of comparable size 2 d^(2/s) without any single mean
/// dominating, while the remaining blocks' variance stays below that scale:
///   max mu_i^2 <= 2 d^(2/s),  (1/a) sum mu_i^2 >= 2 d^(2/s),
///   tail sum sigma_i^2 < 2 d^(2/s).
/// Witness is the (1-based) index of the largest mean; margin the smallest
/// slack ratio of the three inequalities.
std::optional<EventReport> detect_gaussian_event(
    const std::vector<BlockMoments>& moments, double s, std::int64_t a,
    double eta);

/// eta < 1/(mean block length), halved for headroom, capped at 1/2.
double default_eta(const LadderDecomposition& ladder);

struct ScanParams {
  double C = 20.0;   // exponential-event dominance factor
  double eta = 0.0;  // <= 0: derive from the sampled ladder
  std::int64_t a_override = 0;  // > 0: fixed a for the Gaussian detector
  bool exponential = true;
  bool gaussian = true;
};

/// For each scale k with n_k <= budget_blocks: materialize the Q-blocks
/// (n_{k-1}, n_k], compute exact reflected moments at depth b_{d_k}, and run
/// the enabled detectors. Deterministic given seed.
std::vector<EventReport> scan(const OmegaDistribution& dist,
                              const ScaleLadder& ladder,
                              const ScanParams& params,
                              std::int64_t budget_blocks, std::uint64_t seed);

/// Same scan over an already-materialized Q-environment.
std::vector<EventReport> scan_env(const QEnvironment& qenv, double s,
                                  const ScaleLadder& ladder,
                                  const ScanParams& params,
                                  std::int64_t budget_blocks);

void write_event_csv_header(std::ostream& os);
void write_event_csv_row(std::ostream& os, const EventReport& ev);

}  // namespace rwre

#endif  // RWRE_SUBSEQUENCE_HPP_
