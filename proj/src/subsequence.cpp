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

#include "rwre/subsequence.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include "rwre/numeric.hpp"

namespace rwre {

ScaleLadder ScaleLadder::make(int k_max, double delta, std::int64_t cap) {
  if (k_max < 1) throw std::invalid_argument("ScaleLadder: k_max < 1");
  if (delta <= 0.0 || delta > 1.0)
    throw std::invalid_argument("ScaleLadder: delta outside (0,1]");
  ScaleLadder L;
  std::int64_t prev = 0;
  for (int k = 1; k <= k_max; ++k) {
    std::int64_t nk;
    if (k <= 4) {
      nk = std::int64_t{1} << (std::int64_t{1} << k);  // 4, 16, 256, 65536
    } else {
      const double grown =
          std::pow(static_cast<double>(prev), 1.0 + delta);
      nk = grown >= static_cast<double>(cap)
               ? cap
               : static_cast<std::int64_t>(std::llround(grown));
    }
    nk = std::min(nk, cap);
    if (nk <= prev) nk = prev + 1;
    L.n.push_back(nk);
    L.d.push_back(nk - prev);
    const double ld = std::log(static_cast<double>(nk - prev));
    L.b.push_back(std::max<std::int64_t>(
        1, static_cast<std::int64_t>(std::floor(ld * ld))));
    const double la =
        k >= 3 ? std::floor(std::log(std::log(static_cast<double>(k))))
               : 0.0;
    L.a.push_back(std::max<std::int64_t>(1, static_cast<std::int64_t>(la)));
    prev = nk;
  }
  return L;
}

std::optional<EventReport> detect_exponential_event(
    const std::vector<BlockMoments>& moments, double C, double eta) {
  if (C <= 1.0) throw std::invalid_argument("exponential event: C <= 1");
  if (eta <= 0.0 || eta > 1.0)
    throw std::invalid_argument("exponential event: eta outside (0,1]");
  const std::int64_t d = static_cast<std::int64_t>(moments.size());
  if (d == 0) return std::nullopt;
  double total = 0.0;
  for (const BlockMoments& bm : moments) total += bm.sigma2;
  const std::int64_t limit = static_cast<std::int64_t>(
      std::floor(eta * static_cast<double>(d)));
  for (std::int64_t i = 0; i < limit; ++i) {
    const BlockMoments& bm = moments[static_cast<std::size_t>(i)];
    const double rest = total - bm.sigma2;
    const double m2 = bm.M * bm.M;
    if (m2 >= C * rest) {
      EventReport ev;
      ev.kind = EventReport::Kind::kExponential;
      ev.witness = i + 1;
      ev.margin = rest > 0.0 ? m2 / (C * rest) : kInf;
      return ev;
    }
  }
  return std::nullopt;
}

std::optional<EventReport> detect_gaussian_event(
    const std::vector<BlockMoments>& moments, double s, std::int64_t a,
    double eta) {
  if (a < 1) throw std::invalid_argument("gaussian event: a < 1");
  if (eta <= 0.0 || eta > 1.0)
    throw std::invalid_argument("gaussian event: eta outside (0,1]");
  const std::int64_t d = static_cast<std::int64_t>(moments.size());
  if (d == 0) return std::nullopt;
  const double thr =
      2.0 * std::pow(static_cast<double>(d), 2.0 / s);
  const std::int64_t beta = static_cast<std::int64_t>(
      std::floor(eta * static_cast<double>(d)));
  double max_mu2 = 0.0, sum_mu2 = 0.0, tail_sigma2 = 0.0;
  std::int64_t argmax = 0;
  for (std::int64_t i = 0; i < d; ++i) {
    const BlockMoments& bm = moments[static_cast<std::size_t>(i)];
    if (i < beta) {
      const double mu2 = bm.mu * bm.mu;
      sum_mu2 += mu2;
      if (mu2 > max_mu2) {
        max_mu2 = mu2;
        argmax = i;
      }
    } else {
      tail_sigma2 += bm.sigma2;
    }
  }
  if (max_mu2 > thr) return std::nullopt;
  if (sum_mu2 / static_cast<double>(a) < thr) return std::nullopt;
  if (tail_sigma2 >= thr) return std::nullopt;
  EventReport ev;
  ev.kind = EventReport::Kind::kGaussian;
  ev.witness = argmax + 1;
  double margin = max_mu2 > 0.0 ? thr / max_mu2 : kInf;
  margin = std::min(margin, sum_mu2 / (static_cast<double>(a) * thr));
  margin = std::min(margin,
                    tail_sigma2 > 0.0 ? thr / tail_sigma2 : kInf);
  ev.margin = margin;
  return ev;
}

double default_eta(const LadderDecomposition& ladder) {
  const std::int64_t n = ladder.n_blocks();
  if (n == 0) return 0.5;
  const double mean_len =
      static_cast<double>(ladder.nu.back()) / static_cast<double>(n);
  return std::min(0.5, 1.0 / (2.0 * mean_len));
}

namespace {

std::vector<EventReport> scan_impl(const QEnvironment& qenv, double s,
                                   const ScaleLadder& L,
                                   const ScanParams& params,
                                   std::int64_t budget_blocks) {
  const std::int64_t have = qenv.ladder.n_blocks();
  const double eta =
      params.eta > 0.0 ? params.eta : default_eta(qenv.ladder);
  std::vector<EventReport> hits;
  std::int64_t prev = 0;
  for (int k = 1; k <= L.n_scales(); ++k) {
    const std::int64_t nk = L.n[static_cast<std::size_t>(k - 1)];
    if (nk > budget_blocks || nk > have) break;
    const std::int64_t dk = nk - prev;
    const std::int64_t bk = L.b[static_cast<std::size_t>(k - 1)];
    const ReflectionPolicy refl = ReflectionPolicy::blocks(bk);
    // only M, mu, sigma2 feed the detectors; skip the excursion fields
    std::vector<BlockMoments> window(static_cast<std::size_t>(dk));
#pragma omp parallel for schedule(dynamic, 8)
    for (std::int64_t j = 0; j < dk; ++j) {
      const std::int64_t i = prev + 1 + j;
      BlockMoments bm;
      bm.block_index = i;
      const std::int64_t from =
          qenv.ladder.nu[static_cast<std::size_t>(i - 1)];
      const std::int64_t to = qenv.ladder.nu[static_cast<std::size_t>(i)];
      bm.nu_len = to - from;
      bm.M = qenv.ladder.block_max[static_cast<std::size_t>(i - 1)];
      const CrossingMoments cm = crossing_moments_with_cutoff(
          qenv.env, from, to,
          cutoff_for_step(qenv.env, &qenv.ladder, from, refl));
      bm.mu = cm.mean;
      bm.sigma2 = cm.variance;
      window[static_cast<std::size_t>(j)] = bm;
    }
    const std::int64_t a =
        params.a_override > 0 ? params.a_override
                              : L.a[static_cast<std::size_t>(k - 1)];
    auto emit = [&](std::optional<EventReport> ev) {
      if (!ev) return;
      ev->k = k;
      ev->witness += prev;  // window-local index -> ladder block index
      ev->n_k = nk;
      ev->d_k = dk;
      ev->s = s;
      hits.push_back(*ev);
    };
    if (params.exponential)
      emit(detect_exponential_event(window, params.C, eta));
    if (params.gaussian) emit(detect_gaussian_event(window, s, a, eta));
    prev = nk;
  }
  return hits;
}

}  // namespace

std::vector<EventReport> scan(const OmegaDistribution& dist,
                              const ScaleLadder& ladder,
                              const ScanParams& params,
                              std::int64_t budget_blocks,
                              std::uint64_t seed) {
  std::int64_t want = 0;
  for (std::int64_t nk : ladder.n)
    if (nk <= budget_blocks) want = nk;
  if (want == 0) return {};
  const QEnvironment qenv = sample_Q_blocks(dist, want, seed);
  const double s = solve_s(dist).s;
  return scan_impl(qenv, s, ladder, params, budget_blocks);
}

std::vector<EventReport> scan_env(const QEnvironment& qenv, double s,
                                  const ScaleLadder& ladder,
                                  const ScanParams& params,
                                  std::int64_t budget_blocks) {
  return scan_impl(qenv, s, ladder, params, budget_blocks);
}

void write_event_csv_header(std::ostream& os) {
  os << "k,kind,witness,margin,n_k,d_k,s\n";
}

void write_event_csv_row(std::ostream& os, const EventReport& ev) {
  os.precision(17);
  os << ev.k << ","
     << (ev.kind == EventReport::Kind::kGaussian ? "gaussian"
                                                 : "exponential")
     << "," << ev.witness << "," << ev.margin << "," << ev.n_k << ","
     << ev.d_k << "," << ev.s << "\n";
}

}  // namespace rwre
