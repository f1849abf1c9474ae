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

// Compares the serial and OpenMP batch walkers on one workload and checks
// that per-path RNG streams make the two bit-identical.

#include <chrono>
#include <cstdlib>
#include <iostream>

#include "rwre/environment.hpp"
#include "rwre/walk_sim.hpp"

int main(int argc, char** argv) {
  const std::int64_t blocks = argc > 1 ? std::atoll(argv[1]) : 200;
  const std::int64_t paths = argc > 2 ? std::atoll(argv[2]) : 20000;
  const std::uint64_t seed = argc > 3 ? std::strtoull(argv[3], nullptr, 10) : 7;

  const rwre::OmegaDistribution dist =
      rwre::OmegaDistribution::two_point(
          1.0 / 3.0, 4.0 / 5.0, 0.875 / (std::pow(2.0, 1.5) - 0.125));
  const rwre::QEnvironment q = rwre::sample_Q_blocks(dist, blocks, seed);
  rwre::WalkConfig cfg;
  cfg.reflection = rwre::ReflectionPolicy::blocks(10);

  const auto bench = [&](bool parallel) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto res = rwre::mc_hitting_times(
        q.env, 0, q.ladder.nu.back(), &q.ladder, cfg, paths, seed, parallel);
    const auto t1 = std::chrono::steady_clock::now();
    const double sec = std::chrono::duration<double>(t1 - t0).count();
    return std::pair(res, sec);
  };

  const auto [serial, t_serial] = bench(false);
  const auto [parallel, t_parallel] = bench(true);

  bool identical = serial.size() == parallel.size();
  for (std::size_t i = 0; identical && i < serial.size(); ++i)
    identical = serial[i].steps == parallel[i].steps &&
                serial[i].censored == parallel[i].censored;

  double mean = 0.0;
  for (const rwre::HitResult& h : serial) mean += static_cast<double>(h.steps);
  mean /= static_cast<double>(serial.size());

  std::cout << "blocks=" << blocks << " paths=" << paths
            << " mean_T=" << mean << "\n"
            << "serial:   " << t_serial << " s\n"
            << "parallel: " << t_parallel << " s (speedup "
            << t_serial / t_parallel << "x)\n"
            << "bit-identical: " << (identical ? "yes" : "NO") << "\n";
  return identical ? 0 : 1;
}
