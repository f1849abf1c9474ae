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

#include "rwre/quenched_moments.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "rwre/numeric.hpp"

namespace rwre {

namespace {

std::int64_t block_containing(const LadderDecomposition& ladder,
                              std::int64_t j) {
  // smallest i >= 1 with j < nu_i
  const auto it =
      std::upper_bound(ladder.nu.begin(), ladder.nu.end(), j);
  if (it == ladder.nu.begin() || it == ladder.nu.end())
    throw std::out_of_range("site " + std::to_string(j) +
                            " not covered by the ladder decomposition");
  return static_cast<std::int64_t>(it - ladder.nu.begin());
}

std::int64_t blocks_cutoff(const Environment& env,
                           const LadderDecomposition& ladder, std::int64_t i,
                           std::int64_t b) {
  const std::int64_t idx = i - b;
  if (idx >= 0) return ladder.nu[static_cast<std::size_t>(idx)];
  return env.left_index();
}

}  // namespace

std::int64_t cutoff_for_step(const Environment& env,
                             const LadderDecomposition* ladder,
                             std::int64_t j, ReflectionPolicy refl) {
  switch (refl.kind) {
    case ReflectionPolicy::Kind::kNone:
      return env.left_index() - 1;
    case ReflectionPolicy::Kind::kDistance:
      return j + 1 - refl.b;
    case ReflectionPolicy::Kind::kBlocks: {
      if (ladder == nullptr)
        throw std::invalid_argument(
            "blocks reflection needs a ladder decomposition");
      return blocks_cutoff(env, *ladder, block_containing(*ladder, j),
                           refl.b);
    }
  }
  return env.left_index() - 1;
}

CrossingMoments crossing_moments_with_cutoff(const Environment& env,
                                             std::int64_t from,
                                             std::int64_t to,
                                             std::int64_t cutoff) {
  if (from > to) throw std::invalid_argument("crossing: from > to");
  if (cutoff > from)
    throw std::invalid_argument("crossing: cutoff right of the start site");
  if (cutoff < env.left_index() - 1)
    throw std::out_of_range(
        "insufficient context: reflection site " + std::to_string(cutoff) +
        " left of the window edge " + std::to_string(env.left_index()));
  CrossingMoments out;
  if (from == to) return out;
  if (to > env.right_index())
    throw std::out_of_range("crossing target outside the window");
  if (cutoff == from) {
    // the start is the reflection site: that step is deterministic
    out.mean += 1.0;
  }
  double W = 0.0, A = 0.0;
  for (std::int64_t k = cutoff + 1; k < to; ++k) {
    const double w = env.omega_unchecked(k);
    const double r = (1.0 - w) / w;
    A = r * (A + W + W * W);
    W = r * (W + 1.0);
    if (k >= from) {
      out.mean += 1.0 + 2.0 * W;
      out.variance += 4.0 * (W + W * W) + 8.0 * A;
    }
  }
  return out;
}

namespace {

CrossingMoments crossing_moments(const Environment& env, std::int64_t from,
                                 std::int64_t to, ReflectionPolicy refl,
                                 const LadderDecomposition* ladder) {
  if (from > to) throw std::invalid_argument("crossing: from > to");
  CrossingMoments total;
  switch (refl.kind) {
    case ReflectionPolicy::Kind::kNone:
      return crossing_moments_with_cutoff(env, from, to,
                                          env.left_index() - 1);
    case ReflectionPolicy::Kind::kDistance:
      // the cutoff moves with the step, so each site gets its own pass
      for (std::int64_t j = from; j < to; ++j) {
        const CrossingMoments one =
            crossing_moments_with_cutoff(env, j, j + 1, j + 1 - refl.b);
        total.mean += one.mean;
        total.variance += one.variance;
      }
      return total;
    case ReflectionPolicy::Kind::kBlocks: {
      if (ladder == nullptr)
        throw std::invalid_argument(
            "blocks reflection needs a ladder decomposition");
      std::int64_t j = from;
      while (j < to) {
        const std::int64_t i = block_containing(*ladder, j);
        const std::int64_t block_end =
            std::min<std::int64_t>(ladder->nu[static_cast<std::size_t>(i)],
                                   to);
        const std::int64_t cutoff = blocks_cutoff(env, *ladder, i, refl.b);
        const CrossingMoments one =
            crossing_moments_with_cutoff(env, j, block_end, cutoff);
        total.mean += one.mean;
        total.variance += one.variance;
        j = block_end;
      }
      return total;
    }
  }
  return total;
}

}  // namespace

double expected_crossing(const Environment& env, std::int64_t from,
                         std::int64_t to, ReflectionPolicy refl,
                         const LadderDecomposition* ladder) {
  return crossing_moments(env, from, to, refl, ladder).mean;
}

double variance_crossing(const Environment& env, std::int64_t from,
                         std::int64_t to, ReflectionPolicy refl,
                         const LadderDecomposition* ladder) {
  return crossing_moments(env, from, to, refl, ladder).variance;
}

CrossingMoments oracle_moments(const Environment& env, std::int64_t absorb_at,
                               std::int64_t reflect_at, std::int64_t start) {
  if (!(reflect_at < start && start <= absorb_at))
    throw std::invalid_argument("oracle: need reflect_at < start <= absorb_at");
  CrossingMoments out;
  if (start == absorb_at) return out;
  const std::size_t n = static_cast<std::size_t>(absorb_at - reflect_at);
  std::vector<double> lower(n, 0.0), diag(n, 1.0), upper(n, 0.0),
      rhs(n, 1.0);
  // unknowns are sites reflect_at .. absorb_at-1; m_{absorb_at} = 0
  upper[0] = -1.0;  // reflecting site: m = 1 + m_next
  for (std::size_t t = 1; t < n; ++t) {
    const std::int64_t i = reflect_at + static_cast<std::int64_t>(t);
    const double w = env.omega(i);
    lower[t] = -(1.0 - w);
    if (t + 1 < n) upper[t] = -w;
  }
  const std::vector<double> m =
      solve_tridiagonal(lower, diag, upper, rhs);

  std::vector<double> rhs2(n, 0.0);
  rhs2[0] = 1.0 + 2.0 * (n > 1 ? m[1] : 0.0);
  for (std::size_t t = 1; t < n; ++t) {
    const std::int64_t i = reflect_at + static_cast<std::int64_t>(t);
    const double w = env.omega(i);
    const double m_next = (t + 1 < n) ? m[t + 1] : 0.0;
    rhs2[t] = 1.0 + 2.0 * w * m_next + 2.0 * (1.0 - w) * m[t - 1];
  }
  const std::vector<double> u =
      solve_tridiagonal(lower, diag, upper, rhs2);

  const std::size_t t0 = static_cast<std::size_t>(start - reflect_at);
  out.mean = m[t0];
  out.variance = u[t0] - m[t0] * m[t0];
  return out;
}

double oracle_hitting_prob(const Environment& env, std::int64_t lo,
                           std::int64_t hi, std::int64_t start) {
  if (!(lo <= start && start <= hi && lo < hi))
    throw std::invalid_argument("oracle_hitting_prob: bad interval");
  if (start == lo) return 0.0;
  if (start == hi) return 1.0;
  const std::size_t n = static_cast<std::size_t>(hi - lo - 1);
  std::vector<double> lower(n, 0.0), diag(n, 1.0), upper(n, 0.0),
      rhs(n, 0.0);
  for (std::size_t t = 0; t < n; ++t) {
    const std::int64_t i = lo + 1 + static_cast<std::int64_t>(t);
    const double w = env.omega(i);
    if (t > 0) lower[t] = -(1.0 - w);
    if (t + 1 < n)
      upper[t] = -w;
    else
      rhs[t] = w;  // h_hi = 1
  }
  const std::vector<double> h = solve_tridiagonal(lower, diag, upper, rhs);
  return h[static_cast<std::size_t>(start - lo - 1)];
}

namespace {

// prefix[j] = log Pi_{bs, bs+j} for j in [0, nu_len)
std::vector<double> prefix_log_products(const Environment& env,
                                        std::int64_t bs,
                                        std::int64_t nu_len) {
  if (nu_len < 1) throw std::invalid_argument("block must be nonempty");
  std::vector<double> prefix(static_cast<std::size_t>(nu_len));
  double acc = 0.0;
  for (std::int64_t j = 0; j < nu_len; ++j) {
    acc += env.log_rho(bs + j);
    prefix[static_cast<std::size_t>(j)] = acc;
  }
  return prefix;
}

}  // namespace

double success_probability(const Environment& env, std::int64_t block_start,
                           std::int64_t nu_len) {
  const double w0 = env.omega(block_start);
  if (nu_len == 1) return w0;  // no interior sites
  const std::vector<double> prefix =
      prefix_log_products(env, block_start, nu_len);
  const double log_R = logsumexp(prefix);  // R_{0, nu-1}
  // p = omega_0 / sum_{k=0}^{nu-1} Pi_{1,k} = (1 - omega_0) / R_{0,nu-1}
  return std::exp(std::log1p(-w0) - log_R);
}

Environment conditioned_environment(const Environment& env,
                                    std::int64_t block_start,
                                    std::int64_t nu_len) {
  std::vector<double> bar(static_cast<std::size_t>(nu_len), 1.0);
  if (nu_len > 2) {
    const std::vector<double> prefix =
        prefix_log_products(env, block_start, nu_len);
    std::vector<double> log_R(prefix.size());
    double acc = kNegInf;
    for (std::size_t j = 0; j < prefix.size(); ++j) {
      acc = logaddexp(acc, prefix[j]);
      log_R[j] = acc;
    }
    for (std::int64_t i = 2; i < nu_len; ++i) {
      const std::size_t si = static_cast<std::size_t>(i);
      const double log_rho_bar =
          env.log_rho(block_start + i) + log_R[si - 2] - log_R[si];
      bar[si] = 1.0 / (1.0 + std::exp(log_rho_bar));
    }
  }
  return Environment(0, std::move(bar));
}

double expected_success_time(const Environment& env, std::int64_t block_start,
                             std::int64_t nu_len) {
  const Environment bar = conditioned_environment(env, block_start, nu_len);
  return crossing_moments_with_cutoff(bar, 0, nu_len, -1).mean;
}

MExtremes m_extremes(const Environment& env, std::int64_t block_start,
                     std::int64_t nu_len) {
  const std::vector<double> prefix =
      prefix_log_products(env, block_start, nu_len);
  double best = prefix[0];
  for (double v : prefix) best = std::max(best, v);
  std::int64_t tau = 1;
  for (std::int64_t k = 1; k <= nu_len; ++k)
    if (prefix[static_cast<std::size_t>(k - 1)] == best) tau = k;

  MExtremes out;
  out.tau = tau;
  double lo = 0.0;  // log M^- <= 0
  for (std::int64_t i = 1; i < tau; ++i)
    for (std::int64_t j = i; j < tau; ++j)
      lo = std::min(lo, prefix[static_cast<std::size_t>(j)] -
                            prefix[static_cast<std::size_t>(i - 1)]);
  double hi = 0.0;  // log M^+ >= 0
  for (std::int64_t i = tau + 1; i < nu_len; ++i)
    for (std::int64_t j = i; j < nu_len; ++j)
      hi = std::max(hi, prefix[static_cast<std::size_t>(j)] -
                            prefix[static_cast<std::size_t>(i - 1)]);
  out.m_minus = std::exp(lo);
  out.m_plus = std::exp(hi);
  return out;
}

LaplaceBounds laplace_bounds(const BlockMoments& bm, double lambda) {
  if (lambda < 0.0) throw std::domain_error("laplace_bounds: lambda < 0");
  LaplaceBounds out;
  const double ratio = bm.E_S / bm.mu;
  out.lower = (1.0 - lambda * ratio) / (1.0 + lambda);
  const double denom = 1.0 + lambda - (lambda + lambda * lambda) * ratio -
                       0.5 * lambda * lambda *
                           (bm.sigma2 / (bm.mu * bm.mu) - 1.0);
  out.upper = denom > 0.0 ? 1.0 / denom : kInf;
  return out;
}

BlockMoments block_moments(const Environment& env,
                           const LadderDecomposition& ladder, std::int64_t i,
                           ReflectionPolicy refl) {
  if (i < 1 || i > ladder.n_blocks())
    throw std::out_of_range("block index outside ladder");
  BlockMoments bm;
  bm.block_index = i;
  const std::int64_t from = ladder.nu[static_cast<std::size_t>(i - 1)];
  const std::int64_t to = ladder.nu[static_cast<std::size_t>(i)];
  bm.nu_len = to - from;
  bm.M = ladder.block_max[static_cast<std::size_t>(i - 1)];
  const CrossingMoments cm = crossing_moments(env, from, to, refl, &ladder);
  bm.mu = cm.mean;
  bm.sigma2 = cm.variance;
  bm.p_success = success_probability(env, from, bm.nu_len);
  bm.E_S = expected_success_time(env, from, bm.nu_len);
  const MExtremes ext = m_extremes(env, from, bm.nu_len);
  bm.m_minus = ext.m_minus;
  bm.m_plus = ext.m_plus;
  return bm;
}

double sum_block_variances(const Environment& env,
                           const LadderDecomposition& ladder,
                           std::int64_t i_lo, std::int64_t i_hi,
                           std::int64_t backtrack_blocks) {
  if (i_hi > ladder.n_blocks())
    throw std::out_of_range("block window outside ladder");
  double total = 0.0;
  for (std::int64_t i = i_lo + 1; i <= i_hi; ++i) {
    const std::int64_t idx = i - backtrack_blocks;
    std::int64_t cutoff;
    if (idx >= 0) {
      cutoff = ladder.nu[static_cast<std::size_t>(idx)];
    } else if (env.left_index() < ladder.nu.front()) {
      cutoff = env.left_index();
    } else {
      throw std::out_of_range("insufficient left context: block " +
                              std::to_string(i) + " needs " +
                              std::to_string(-idx) + " extra blocks");
    }
    total += crossing_moments_with_cutoff(
                 env, ladder.nu[static_cast<std::size_t>(i - 1)],
                 ladder.nu[static_cast<std::size_t>(i)], cutoff)
                 .variance;
  }
  return total;
}

void write_block_moments_csv_header(std::ostream& os) {
  os << "block_index,nu_len,M,mu,sigma2,p_success,E_S,m_minus,m_plus\n";
}

void write_block_moments_csv_row(std::ostream& os, const BlockMoments& bm) {
  os.precision(17);
  os << bm.block_index << "," << bm.nu_len << "," << bm.M << "," << bm.mu
     << "," << bm.sigma2 << "," << bm.p_success << "," << bm.E_S << ","
     << bm.m_minus << "," << bm.m_plus << "\n";
}

}  // namespace rwre
