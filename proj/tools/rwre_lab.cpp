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

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "CLI11.hpp"
#include "json.hpp"
#include "rwre/experiment.hpp"
#include "rwre/limit_laws.hpp"
#include "rwre/quenched_moments.hpp"
#include "rwre/subsequence.hpp"
#include "rwre/walk_sim.hpp"

namespace {

using nlohmann::json;

void set_workers(int workers) {
  if (workers <= 0) {
    if (const char* env = std::getenv("RWRE_WORKERS")) workers = std::atoi(env);
  }
#ifdef _OPENMP
  if (workers > 0) omp_set_num_threads(workers);
#else
  (void)workers;
#endif
}

rwre::OmegaDistribution load_dist(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open distribution spec " + path);
  json j;
  is >> j;
  return rwre::distribution_from_json(j);
}

rwre::Environment load_env(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open environment " + path);
  return rwre::Environment::load(is);
}

int cmd_run(const std::string& config_path, std::uint64_t seed_override,
            bool has_seed, bool gate, const std::string& out_dir) {
  if (config_path.empty())
    throw std::runtime_error("run: missing config (positional or --config)");
  rwre::ExperimentConfig cfg = rwre::ExperimentConfig::from_file(config_path);
  if (has_seed) {
    cfg.seed = seed_override;
    cfg.raw["seed"] = seed_override;
  }
  const rwre::ExperimentOutcome outcome = rwre::run_experiment(cfg, out_dir);
  std::cout << outcome.report.dump(2) << "\n";
  return gate && !outcome.gate_pass ? 1 : 0;
}

int cmd_env_gen(const std::string& dist_path, std::int64_t blocks,
                std::uint64_t seed, const std::string& out_dir) {
  const rwre::OmegaDistribution dist = load_dist(dist_path);
  const rwre::QEnvironment q = rwre::sample_Q_blocks(dist, blocks, seed);
  std::filesystem::create_directories(out_dir);
  {
    std::ofstream os(out_dir + "/env.txt", std::ios::binary);
    q.env.save(os);
  }
  {
    std::ofstream os(out_dir + "/ladder.csv", std::ios::binary);
    os.precision(17);
    os << "block_index,nu,block_len,M\n";
    for (std::int64_t i = 1; i <= q.ladder.n_blocks(); ++i)
      os << i << "," << q.ladder.nu[static_cast<std::size_t>(i)] << ","
         << q.ladder.block_len[static_cast<std::size_t>(i - 1)] << ","
         << q.ladder.block_max[static_cast<std::size_t>(i - 1)] << "\n";
  }
  std::cout << "wrote " << out_dir << "/env.txt (" << q.env.length()
            << " sites, " << q.ladder.n_blocks() << " blocks)\n";
  return 0;
}

int cmd_moments(const std::string& env_path, std::int64_t scale,
                const std::string& out_dir) {
  const rwre::Environment env = load_env(env_path);
  rwre::LadderDecomposition ladder;
  try {
    ladder = rwre::ladder_locations(env, std::numeric_limits<std::int64_t>::max());
  } catch (const rwre::PartialLadderError& e) {
    ladder = e.found;
  }
  const double ls = std::log(static_cast<double>(scale));
  const std::int64_t b = std::max<std::int64_t>(
      1, static_cast<std::int64_t>(std::floor(ls * ls)));
  const rwre::ReflectionPolicy refl = rwre::ReflectionPolicy::blocks(b);
  std::filesystem::create_directories(out_dir);
  std::ofstream os(out_dir + "/block_moments.csv", std::ios::binary);
  rwre::write_block_moments_csv_header(os);
  for (std::int64_t i = 1; i <= ladder.n_blocks(); ++i)
    rwre::write_block_moments_csv_row(
        os, rwre::block_moments(env, ladder, i, refl));
  std::cout << "wrote " << out_dir << "/block_moments.csv ("
            << ladder.n_blocks() << " blocks, b=" << b << ")\n";
  return 0;
}

int cmd_simulate(const std::string& env_path, std::int64_t from,
                 std::int64_t to, std::int64_t paths, std::uint64_t seed,
                 std::int64_t max_steps, const std::string& out_dir) {
  const rwre::Environment env = load_env(env_path);
  rwre::WalkConfig cfg;
  cfg.max_steps = max_steps;
  const std::vector<rwre::HitResult> hits =
      rwre::mc_hitting_times(env, from, to, nullptr, cfg, paths, seed);
  std::filesystem::create_directories(out_dir);
  std::ofstream os(out_dir + "/simulate_samples.csv", std::ios::binary);
  os << "path_id,kind,value,censored\n";
  for (std::size_t i = 0; i < hits.size(); ++i)
    os << i << ",T," << hits[i].steps << "," << (hits[i].censored ? 1 : 0)
       << "\n";
  std::cout << "wrote " << out_dir << "/simulate_samples.csv\n";
  return 0;
}

int cmd_scan(const std::string& dist_path, std::uint64_t seed, int k_max,
             std::int64_t budget, double C, double eta,
             const std::string& out_dir) {
  const rwre::OmegaDistribution dist = load_dist(dist_path);
  rwre::ScanParams sp;
  sp.C = C;
  sp.eta = eta;
  const rwre::ScaleLadder ladder = rwre::ScaleLadder::make(k_max);
  const std::vector<rwre::EventReport> events =
      rwre::scan(dist, ladder, sp, budget, seed);
  std::filesystem::create_directories(out_dir);
  std::ofstream os(out_dir + "/scan_events.csv", std::ios::binary);
  rwre::write_event_csv_header(os);
  for (const rwre::EventReport& ev : events) rwre::write_event_csv_row(os, ev);
  std::cout << "wrote " << out_dir << "/scan_events.csv (" << events.size()
            << " events)\n";
  return 0;
}

std::vector<double> read_values(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open samples " + path);
  std::string line;
  std::getline(is, line);  // header
  std::vector<double> values;
  while (std::getline(is, line)) {
    std::stringstream ss(line);
    std::string cell;
    std::vector<std::string> cells;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() < 4 || cells[3] == "1") continue;
    values.push_back(std::stod(cells[2]));
  }
  return values;
}

int cmd_limits(const std::string& samples_path, const std::string& law,
               double index, double b) {
  const std::vector<double> values = read_values(samples_path);
  const rwre::EmpiricalCDF ecdf(values);
  double ks;
  if (law == "exp") {
    ks = rwre::ks_distance(ecdf, rwre::exp_cdf);
  } else if (law == "shifted-exp") {
    ks = rwre::ks_distance(ecdf, rwre::shifted_exp_cdf);
  } else if (law == "normal") {
    ks = rwre::ks_distance(ecdf, rwre::normal_cdf);
  } else if (law == "stable") {
    double fitted = b > 0.0 ? b : rwre::fit_stable_b(index, values);
    const rwre::StableSpec spec{index, fitted};
    ks = rwre::ks_distance(
        ecdf, [&](double x) { return rwre::stable_cdf(spec, x); });
    b = fitted;
  } else {
    throw std::runtime_error("unknown law '" + law + "'");
  }
  json out = {{"law", law},
              {"n_samples", values.size()},
              {"ks", ks}};
  if (law == "stable") {
    out["index"] = index;
    out["fitted_b"] = b;
  }
  std::cout << out.dump(2) << "\n";
  return 0;
}

int cmd_report(const std::string& dir) {
  json merged = json::array();
  std::vector<std::string> paths;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    const std::string name = entry.path().filename().string();
    if (name.size() > 12 &&
        name.substr(name.size() - 12) == "_report.json")
      paths.push_back(entry.path().string());
  }
  std::sort(paths.begin(), paths.end());
  for (const std::string& p : paths) {
    std::ifstream is(p);
    json j;
    is >> j;
    merged.push_back(j);
  }
  std::ofstream os(dir + "/summary.json", std::ios::binary);
  os << merged.dump(2) << "\n";
  std::cout << merged.dump(2) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"rwre-lab: transient 1-D random walk in random environment"};
  app.require_subcommand(1);

  int workers = 0;
  app.add_option("--workers", workers, "worker thread count");

  // run
  auto* run = app.add_subcommand("run", "run an experiment config");
  std::string config_path, out_dir = "out";
  std::uint64_t seed = 0;
  bool gate = false;
  run->add_option("config_file", config_path, "JSON experiment config");
  run->add_option("--config", config_path, "JSON experiment config");
  auto* seed_opt = run->add_option("--seed", seed, "override config seed");
  run->add_flag("--gate", gate, "exit nonzero when the gate fails");
  run->add_option("--out", out_dir, "artifact directory");

  // env-gen
  auto* envgen = app.add_subcommand("env-gen", "sample a Q-environment");
  std::string dist_path;
  std::int64_t blocks = 100;
  std::uint64_t eg_seed = 1;
  std::string eg_out = "out";
  envgen->add_option("--dist", dist_path, "distribution JSON")->required();
  envgen->add_option("--blocks", blocks, "ladder blocks to sample");
  envgen->add_option("--seed", eg_seed, "RNG seed");
  envgen->add_option("--out", eg_out, "output directory");

  // moments
  auto* moments = app.add_subcommand("moments", "exact block moments");
  std::string env_path;
  std::int64_t scale = 1024;
  std::string m_out = "out";
  moments->add_option("--env", env_path, "environment file")->required();
  moments->add_option("--scale", scale, "reflection scale n (b = log^2 n)");
  moments->add_option("--out", m_out, "output directory");

  // simulate
  auto* simulate = app.add_subcommand("simulate", "MC hitting times");
  std::string s_env;
  std::int64_t s_from = 0, s_to = 1, s_paths = 1000,
               s_max_steps = 100'000'000;
  std::uint64_t s_seed = 1;
  std::string s_out = "out";
  simulate->add_option("--env", s_env, "environment file")->required();
  simulate->add_option("--from", s_from, "start site");
  simulate->add_option("--to", s_to, "target site")->required();
  simulate->add_option("--paths", s_paths, "number of paths");
  simulate->add_option("--seed", s_seed, "RNG seed");
  simulate->add_option("--max-steps", s_max_steps, "censoring cap");
  simulate->add_option("--out", s_out, "output directory");

  // scan
  auto* scan_cmd = app.add_subcommand("scan", "event detectors over scales");
  std::string sc_dist;
  std::uint64_t sc_seed = 1;
  int sc_kmax = 4;
  std::int64_t sc_budget = 65536;
  double sc_C = 2.0, sc_eta = 0.0;
  std::string sc_out = "out";
  scan_cmd->add_option("--dist", sc_dist, "distribution JSON")->required();
  scan_cmd->add_option("--seed", sc_seed, "RNG seed");
  scan_cmd->add_option("--k-max", sc_kmax, "ladder length");
  scan_cmd->add_option("--budget", sc_budget, "max blocks per scale");
  scan_cmd->add_option("--C", sc_C, "exponential dominance factor");
  scan_cmd->add_option("--eta", sc_eta, "window fraction (0 = auto)");
  scan_cmd->add_option("--out", sc_out, "output directory");

  // limits
  auto* limits = app.add_subcommand("limits", "goodness of fit on samples");
  std::string l_samples, l_law = "exp";
  double l_index = 0.75, l_b = 0.0;
  limits->add_option("--samples", l_samples, "samples CSV")->required();
  limits->add_option("--law", l_law, "exp|shifted-exp|normal|stable");
  limits->add_option("--index", l_index, "stable index");
  limits->add_option("--b", l_b, "stable scale (0 = fit)");

  // report
  auto* report = app.add_subcommand("report", "merge report JSONs");
  std::string r_dir = "out";
  report->add_option("--dir", r_dir, "directory of *_report.json files");

  CLI11_PARSE(app, argc, argv);
  set_workers(workers);

  try {
    if (run->parsed())
      return cmd_run(config_path, seed, seed_opt->count() > 0, gate, out_dir);
    if (envgen->parsed()) return cmd_env_gen(dist_path, blocks, eg_seed, eg_out);
    if (moments->parsed()) return cmd_moments(env_path, scale, m_out);
    if (simulate->parsed())
      return cmd_simulate(s_env, s_from, s_to, s_paths, s_seed, s_max_steps,
                          s_out);
    if (scan_cmd->parsed())
      return cmd_scan(sc_dist, sc_seed, sc_kmax, sc_budget, sc_C, sc_eta,
                      sc_out);
    if (limits->parsed()) return cmd_limits(l_samples, l_law, l_index, l_b);
    if (report->parsed()) return cmd_report(r_dir);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
