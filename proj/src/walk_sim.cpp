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

#include "rwre/walk_sim.hpp"

#include <stdexcept>
#include <string>

namespace rwre {

HitResult simulate_hitting_time(const Environment& env, std::int64_t start,
                                std::int64_t target,
                                const LadderDecomposition* ladder,
                                const WalkConfig& cfg, RngStream& rng) {
  if (start > target)
    throw std::invalid_argument("simulate_hitting_time: start > target");
  HitResult res;
  std::int64_t pos = start;
  std::int64_t x_max = start;
  // active reflection site for the push toward x_max + 1
  std::int64_t cutoff = cutoff_for_step(env, ladder, x_max, cfg.reflection);
  while (pos != target) {
    if (res.steps >= cfg.max_steps) {
      res.censored = true;
      return res;
    }
    ++res.steps;
    const bool right = pos == cutoff || rng.bernoulli(env.omega(pos));
    pos += right ? 1 : -1;
    if (pos > x_max) {
      x_max = pos;
      if (pos == target) break;
      cutoff = cutoff_for_step(env, ladder, x_max, cfg.reflection);
    }
  }
  return res;
}

PositionResult simulate_position(const Environment& env, std::int64_t t,
                                 const WalkConfig& cfg, RngStream& rng) {
  PositionResult res;
  std::int64_t cutoff = cutoff_for_step(env, nullptr, 0, cfg.reflection);
  for (std::int64_t step = 0; step < t; ++step) {
    if (!env.contains(res.x) && res.x != cutoff)
      throw std::out_of_range(
          "walk left the environment window at site " +
          std::to_string(res.x) + " after " + std::to_string(step) +
          " steps; extend the window");
    const bool right = res.x == cutoff || rng.bernoulli(env.omega(res.x));
    res.x += right ? 1 : -1;
    if (res.x > res.x_max) {
      res.x_max = res.x;
      cutoff = cutoff_for_step(env, nullptr, res.x_max, cfg.reflection);
    }
  }
  return res;
}

ExcursionSample simulate_excursions(const Environment& env,
                                    std::int64_t nu_len, std::int64_t cutoff,
                                    std::int64_t max_steps, RngStream& rng) {
  if (nu_len < 1)
    throw std::invalid_argument("simulate_excursions: empty block");
  if (cutoff >= 0)
    throw std::invalid_argument(
        "simulate_excursions: cutoff must lie left of the block");
  ExcursionSample out;
  for (;;) {
    std::int64_t pos = 0;
    std::int64_t duration = 0;
    do {
      if (out.total >= max_steps) {
        out.censored = true;
        return out;
      }
      ++duration;
      ++out.total;
      const bool right = pos == cutoff || rng.bernoulli(env.omega(pos));
      pos += right ? 1 : -1;
    } while (pos != 0 && pos != nu_len);
    if (pos == nu_len) {
      out.success_time = duration;
      return out;
    }
    ++out.n_failures;
    out.failure_times.push_back(duration);
  }
}

std::vector<HitResult> mc_hitting_times(const Environment& env,
                                        std::int64_t start,
                                        std::int64_t target,
                                        const LadderDecomposition* ladder,
                                        const WalkConfig& cfg,
                                        std::int64_t n_paths,
                                        std::uint64_t seed, bool parallel) {
  std::vector<HitResult> out(static_cast<std::size_t>(n_paths));
#pragma omp parallel for schedule(dynamic, 16) if (parallel)
  for (std::int64_t i = 0; i < n_paths; ++i) {
    RngStream rng(seed, static_cast<std::uint64_t>(i));
    out[static_cast<std::size_t>(i)] =
        simulate_hitting_time(env, start, target, ladder, cfg, rng);
  }
  return out;
}

std::vector<PositionResult> mc_positions(const Environment& env,
                                         std::int64_t t, const WalkConfig& cfg,
                                         std::int64_t n_paths,
                                         std::uint64_t seed, bool parallel) {
  std::vector<PositionResult> out(static_cast<std::size_t>(n_paths));
#pragma omp parallel for schedule(dynamic, 4) if (parallel)
  for (std::int64_t i = 0; i < n_paths; ++i) {
    RngStream rng(seed, static_cast<std::uint64_t>(i));
    out[static_cast<std::size_t>(i)] = simulate_position(env, t, cfg, rng);
  }
  return out;
}

std::vector<ExcursionSample> mc_excursions(const Environment& env,
                                           std::int64_t nu_len,
                                           std::int64_t cutoff,
                                           std::int64_t max_steps,
                                           std::int64_t n_paths,
                                           std::uint64_t seed, bool parallel) {
  std::vector<ExcursionSample> out(static_cast<std::size_t>(n_paths));
#pragma omp parallel for schedule(dynamic, 16) if (parallel)
  for (std::int64_t i = 0; i < n_paths; ++i) {
    RngStream rng(seed, static_cast<std::uint64_t>(i));
    out[static_cast<std::size_t>(i)] =
        simulate_excursions(env, nu_len, cutoff, max_steps, rng);
  }
  return out;
}

}  // namespace rwre
