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

#ifndef RWRE_WALK_SIM_HPP_
#define RWRE_WALK_SIM_HPP_

#include <cstdint>
#include <vector>

#include "rwre/environment.hpp"
#include "rwre/quenched_moments.hpp"
#include "rwre/rng.hpp"

namespace rwre {

struct WalkConfig {
  ReflectionPolicy reflection = ReflectionPolicy::none();
  std::int64_t max_steps = 2'000'000'000;  // hard abort; hits are censored
  bool record_running_max = false;
};

struct HitResult {
  std::int64_t steps = 0;
  bool censored = false;  // max_steps exceeded before the target was hit
};

struct PositionResult {
  std::int64_t x = 0;
  std::int64_t x_max = 0;
};

/// One crossing of a block [0, nu) split into failure excursions (return to
/// 0) and the final success excursion; total = success + sum of failures.
struct ExcursionSample {
  std::int64_t n_failures = 0;
  std::vector<std::int64_t> failure_times;
  std::int64_t success_time = 0;
  std::int64_t total = 0;
  bool censored = false;
};

/// Steps of the quenched walk from `start` until the first visit to
/// `target`. The reflection cutoff tracks the running maximum: whenever the
/// walk is pushing toward a new rightmost site m, the site
/// cutoff_for_step(m) acts as omega = 1.
HitResult simulate_hitting_time(const Environment& env, std::int64_t start,
                                std::int64_t target,
                                const LadderDecomposition* ladder,
                                const WalkConfig& cfg, RngStream& rng);

/// Terminal and running-max positions after t steps from 0.
PositionResult simulate_position(const Environment& env, std::int64_t t,
                                 const WalkConfig& cfg, RngStream& rng);

/// Excursion-decomposed crossing of the block [0, nu_len): repeated
/// excursions from 0 until one reaches nu_len. Failure excursions may pass
/// left of 0; `cutoff` is the fixed reflection site (pass
/// env.left_index() - 1 for none).
ExcursionSample simulate_excursions(const Environment& env,
                                    std::int64_t nu_len, std::int64_t cutoff,
                                    std::int64_t max_steps, RngStream& rng);

/// Batch drivers: path i always consumes RngStream(seed, i), so the results
/// are identical whether or not OpenMP splits the loop.
std::vector<HitResult> mc_hitting_times(const Environment& env,
                                        std::int64_t start,
                                        std::int64_t target,
                                        const LadderDecomposition* ladder,
                                        const WalkConfig& cfg,
                                        std::int64_t n_paths,
                                        std::uint64_t seed,
                                        bool parallel = true);

std::vector<PositionResult> mc_positions(const Environment& env,
                                         std::int64_t t, const WalkConfig& cfg,
                                         std::int64_t n_paths,
                                         std::uint64_t seed,
                                         bool parallel = true);

std::vector<ExcursionSample> mc_excursions(const Environment& env,
                                           std::int64_t nu_len,
                                           std::int64_t cutoff,
                                           std::int64_t max_steps,
                                           std::int64_t n_paths,
                                           std::uint64_t seed,
                                           bool parallel = true);

}  // namespace rwre

#endif  // RWRE_WALK_SIM_HPP_
