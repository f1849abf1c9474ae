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

#ifndef RWRE_EXPERIMENT_HPP_
#define RWRE_EXPERIMENT_HPP_

#include <cstdint>
#include <string>

#include "json.hpp"
#include "rwre/environment.hpp"

namespace rwre {

/// One experiment run, parsed from a JSON config:
///   {
///     "experiment": "speed" | "moments-check" | "block-exponential" |
///                   "variance-stable" | "scan" | "clt-subsequence" |
///                   "exp-subsequence" | "annealed-stable",
///     "distribution": {"kind": "two_point", "omega_a": .., "omega_b": ..,
///                      "q": ..} | {"kind": "beta", "alpha": .., "beta": ..}
///                     | {"kind": "discrete", "atoms": [[omega, weight]..]},
///     "seed": 1,
///     "params": { ... experiment-specific knobs ... }
///   }
struct ExperimentConfig {
  std::string kind;
  OmegaDistribution dist;
  std::uint64_t seed = 1;
  nlohmann::json params;  // kind-specific; missing keys take defaults
  nlohmann::json raw;     // the full config, for hashing

  static ExperimentConfig from_json(const nlohmann::json& j);
  static ExperimentConfig from_file(const std::string& path);
};

OmegaDistribution distribution_from_json(const nlohmann::json& j);
nlohmann::json distribution_to_json(const OmegaDistribution& dist);

/// FNV-1a over the canonical (sorted-key) dump; stable under reordering.
std::uint64_t config_hash(const nlohmann::json& j);

struct ExperimentOutcome {
  nlohmann::json report;
  bool gate_pass = true;
};

/// Runs the experiment and, when out_dir is nonempty, writes
/// `<kind>_report.json` plus sample/event CSVs there. Artifacts carry no
/// timestamps: identical config + seed gives byte-identical files.
ExperimentOutcome run_experiment(const ExperimentConfig& cfg,
                                 const std::string& out_dir);

}  // namespace rwre

#endif  // RWRE_EXPERIMENT_HPP_
