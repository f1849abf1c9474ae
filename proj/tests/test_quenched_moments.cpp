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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <vector>

#include "doctest.h"
#include "rwre/environment.hpp"
#include "rwre/numeric.hpp"
#include "rwre/quenched_moments.hpp"
#include "rwre/walk_sim.hpp"

using namespace rwre;

namespace {

const double kFixtureQ = 0.32366324654752765;

OmegaDistribution fixture() {
  return OmegaDistribution::two_point(1.0 / 3.0, 4.0 / 5.0, kFixtureQ);
}

// O(nu^2) reference for the crossing variance: per-site contribution
// 4(W_j + W_j^2) + 8 A_j with A_j expanded as the explicit double sum
// A_j = sum_{i<j} Pi_{i+1,j} (W_i + W_i^2), all W cut at `cutoff`.
CrossingMoments naive_crossing(const Environment& env, std::int64_t from,
                               std::int64_t to, std::int64_t cutoff) {
  double mean = 0.0, var = 0.0;
  for (std::int64_t j = from; j < to; ++j) {
    if (j == cutoff) {
      mean += 1.0;
      continue;
    }
    const double wj = w_tail(env, j, cutoff);
    mean += 1.0 + 2.0 * wj;
    double a = 0.0;
    for (std::int64_t i = std::max(cutoff, env.left_index() - 1) + 1; i < j;
         ++i) {
      if (i <= cutoff) continue;
      const double wi = w_tail(env, i, cutoff);
      a += pi(env, i + 1, j) * (wi + wi * wi);
    }
    var += 4.0 * (wj + wj * wj) + 8.0 * a;
  }
  return {mean, var};
}

}  // namespace

TEST_CASE("homogeneous crossing 0->1: truncated geometric mean, limit 3") {
  // omega = 2/3 (rho = 1/2): untruncated E T_{0->1} = (1+rho)/(1-rho) = 3
  Environment env(-40, std::vector<double>(45, 2.0 / 3.0));
  const double mean =
      expected_crossing(env, 0, 1, ReflectionPolicy::none());
  CHECK(mean == doctest::Approx(3.0).epsilon(1e-9));
  // shallow cutoff truncates the series strictly below the limit
  const auto cm = crossing_moments_with_cutoff(env, 0, 1, -3);
  CHECK(cm.mean < 3.0);
  CHECK(cm.mean > 1.0);
}

TEST_CASE("forced site: omega_0 = 1 crossing 0->1 is exactly one step") {
  Environment env(0, {1.0, 0.5});
  const auto cm = crossing_moments_with_cutoff(env, 0, 1,
                                               env.left_index() - 1);
  CHECK(cm.mean == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(cm.variance == doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("deterministic environment omega=1 has zero variance") {
  Environment env(0, std::vector<double>(10, 1.0));
  const auto cm = crossing_moments_with_cutoff(env, 0, 10, -1);
  CHECK(cm.mean == doctest::Approx(10.0).epsilon(1e-14));
  CHECK(cm.variance == doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("single site with cutoff at the start") {
  const Environment env = sample_environment(fixture(), -5, 5, 31);
  const auto cm = crossing_moments_with_cutoff(env, 0, 1, 0);
  // reflection at the start forces the first step: T = 1 deterministically
  CHECK(cm.mean == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(cm.variance == doctest::Approx(0.0).epsilon(1e-14));
  // cutoff one left of the start: W_0 = rho_0 only
  const auto cm2 = crossing_moments_with_cutoff(env, 0, 1, -1);
  const double w0 = env.rho(0);
  CHECK(cm2.mean == doctest::Approx(1.0 + 2.0 * w0).epsilon(1e-12));
  CHECK(cm2.variance ==
        doctest::Approx(4.0 * (w0 + w0 * w0)).epsilon(1e-12));
  const auto om = oracle_moments(env, 1, -1, 0);
  CHECK(cm2.mean == doctest::Approx(om.mean).epsilon(1e-10));
  CHECK(cm2.variance == doctest::Approx(om.variance).epsilon(1e-10));
}

TEST_CASE("oracle equivalence on 100 random environments, both laws") {
  int checked = 0;
  for (int e = 0; e < 100; ++e) {
    const auto dist = e % 2 == 0
                          ? fixture()
                          : OmegaDistribution::beta(5.0, 2.0);
    const Environment env =
        sample_environment(dist, -20, 45, 1000 + static_cast<unsigned>(e));
    const std::int64_t cutoff = -1 - (e % 19);
    for (std::int64_t to : {5, 20, 40}) {
      const auto exact = crossing_moments_with_cutoff(env, 0, to, cutoff);
      const auto oracle = oracle_moments(env, to, cutoff, 0);
      CHECK(exact.mean ==
            doctest::Approx(oracle.mean).epsilon(1e-9));
      CHECK(exact.variance ==
            doctest::Approx(oracle.variance).epsilon(1e-9));
      ++checked;
    }
  }
  CHECK(checked == 300);
}

TEST_CASE("oracle absorb_at == start gives (0,0)") {
  const Environment env = sample_environment(fixture(), -5, 5, 2);
  const auto om = oracle_moments(env, 0, -3, 0);
  CHECK(om.mean == 0.0);
  CHECK(om.variance == 0.0);
}

TEST_CASE("streaming variance matches the naive double loop") {
  for (int e = 0; e < 20; ++e) {
    const Environment env =
        sample_environment(fixture(), -10, 30, 400 + static_cast<unsigned>(e));
    const std::int64_t cutoff = -1 - (e % 8);
    const auto fast = crossing_moments_with_cutoff(env, 0, 25, cutoff);
    const auto slow = naive_crossing(env, 0, 25, cutoff);
    CHECK(fast.mean == doctest::Approx(slow.mean).epsilon(1e-12));
    CHECK(fast.variance == doctest::Approx(slow.variance).epsilon(1e-11));
  }
}

TEST_CASE("reflection monotonicity: deeper cutoff never lowers the moments") {
  const Environment env = sample_environment(fixture(), -30, 30, 55);
  double prev_mean = -1.0, prev_var = -1.0;
  for (std::int64_t cutoff = 0; cutoff >= -30; --cutoff) {
    const auto cm = crossing_moments_with_cutoff(env, 0, 25, cutoff);
    CHECK(cm.mean >= prev_mean - 1e-12);
    CHECK(cm.variance >= prev_var - 1e-9);
    prev_mean = cm.mean;
    prev_var = cm.variance;
  }
}

TEST_CASE("cutoff_for_step policies") {
  const QEnvironment q = sample_Q_blocks(fixture(), 30, 91);
  // distance(b): step j -> j+1 reflects at j+1-b
  CHECK(cutoff_for_step(q.env, nullptr, 10, ReflectionPolicy::distance(4)) ==
        7);
  // blocks(b): crossing block i reflects at nu_{i-b}
  const auto& nu = q.ladder.nu;
  for (std::int64_t i = 5; i < 10; ++i) {
    const std::int64_t j = nu[i];  // first site of block i+1
    CHECK(cutoff_for_step(q.env, &q.ladder, j,
                          ReflectionPolicy::blocks(3)) == nu[i + 1 - 3]);
  }
  // below the ladder: clamp to the window edge
  CHECK(cutoff_for_step(q.env, &q.ladder, 0, ReflectionPolicy::blocks(3)) ==
        q.env.left_index());
  CHECK(cutoff_for_step(q.env, nullptr, 3, ReflectionPolicy::none()) ==
        q.env.left_index() - 1);
}

TEST_CASE("success probability: forced and homogeneous cases") {
  // nu = 1: p = omega_0
  const Environment env = sample_environment(fixture(), 0, 6, 12);
  CHECK(success_probability(env, 0, 1) ==
        doctest::Approx(env.omega(0)).epsilon(1e-12));
  // homogeneous omega = 2/3, nu = 2: p = omega_0 * P_1(hit 2 before 0)
  // gambler's ruin with rho = 1/2: P_1 = (1)/(1 + 1/2)... = 2/3 -> p = 4/9
  Environment hom(0, std::vector<double>(4, 2.0 / 3.0));
  CHECK(success_probability(hom, 0, 2) ==
        doctest::Approx(4.0 / 9.0).epsilon(1e-12));
}

TEST_CASE("success probability matches the tridiagonal oracle on blocks") {
  for (int e = 0; e < 30; ++e) {
    const QEnvironment q =
        sample_Q_blocks(fixture(), 1, 300 + static_cast<unsigned>(e));
    const std::int64_t nu = q.ladder.nu[1];
    const double p = success_probability(q.env, 0, nu);
    if (nu == 1) {
      CHECK(p == doctest::Approx(q.env.omega(0)).epsilon(1e-12));
      continue;
    }
    // first step right (prob omega_0), then hit nu before returning to 0
    const double oracle =
        q.env.omega(0) * oracle_hitting_prob(q.env, 0, nu, 1);
    CHECK(p == doctest::Approx(oracle).epsilon(1e-12));
  }
}

TEST_CASE("conditioned environment properties") {
  // nu <= 2 -> all ones
  Environment hom(0, std::vector<double>(4, 2.0 / 3.0));
  const Environment cond2 = conditioned_environment(hom, 0, 2);
  CHECK(cond2.omega(0) == 1.0);
  CHECK(cond2.omega(1) == 1.0);

  for (int e = 0; e < 20; ++e) {
    const QEnvironment q =
        sample_Q_blocks(fixture(), 1, 600 + static_cast<unsigned>(e));
    const std::int64_t nu = q.ladder.nu[1];
    if (nu < 4) continue;
    const Environment cond = conditioned_environment(q.env, 0, nu);
    CHECK(cond.omega(0) == 1.0);
    CHECK(cond.omega(1) == 1.0);
    // Pi_bar_{i,j} <= Pi_{i,j} for 2 <= i <= j < nu
    for (std::int64_t i = 2; i < nu; ++i)
      for (std::int64_t j = i; j < nu; ++j)
        CHECK(log_pi(cond, i, j) <= log_pi(q.env, i, j) + 1e-10);
  }
}

TEST_CASE("expected success time: trivial block and oracle equivalence") {
  const Environment env = sample_environment(fixture(), 0, 8, 3);
  CHECK(expected_success_time(env, 0, 1) == doctest::Approx(1.0).epsilon(1e-14));

  for (int e = 0; e < 20; ++e) {
    const QEnvironment q =
        sample_Q_blocks(fixture(), 1, 800 + static_cast<unsigned>(e));
    const std::int64_t nu = q.ladder.nu[1];
    const double es = expected_success_time(q.env, 0, nu);
    const Environment cond = conditioned_environment(q.env, 0, nu);
    const auto om = oracle_moments(cond, nu, -1, 0);
    CHECK(es == doctest::Approx(om.mean).epsilon(1e-10));
    // E_S <= nu + 2 nu^2 M_bar with M_bar >= 1; loose form with block max
    const double mbar = std::max(1.0, q.ladder.block_max[0]);
    CHECK(es <= static_cast<double>(nu) +
                    2.0 * static_cast<double>(nu * nu) * mbar + 1e-9);
  }
}

TEST_CASE("conditioned walk never returns to 0 and matches E_S by MC") {
  const QEnvironment q = sample_Q_blocks(fixture(), 1, 424242);
  const std::int64_t nu = q.ladder.nu[1];
  const Environment cond = conditioned_environment(q.env, 0, nu);
  const double es = expected_success_time(q.env, 0, nu);
  WalkConfig wc;
  const auto res = mc_hitting_times(cond, 0, nu, nullptr, wc, 100000, 7);
  double sum = 0.0, sum2 = 0.0;
  for (const auto& h : res) {
    CHECK_FALSE(h.censored);
    sum += static_cast<double>(h.steps);
    sum2 += static_cast<double>(h.steps) * static_cast<double>(h.steps);
  }
  const double n = static_cast<double>(res.size());
  const double mean = sum / n;
  const double se = std::sqrt((sum2 / n - mean * mean) / n);
  CHECK(std::fabs(mean - es) < 3.0 * se + 1e-9);
}

TEST_CASE("m_extremes conventions and brute force") {
  // single-site block -> (1, 1, tau=1)
  const Environment env = sample_environment(fixture(), 0, 3, 14);
  const auto me1 = m_extremes(env, 0, 1);
  CHECK(me1.m_minus == 1.0);
  CHECK(me1.m_plus == 1.0);
  CHECK(me1.tau == 1);

  // descending block (all rho < 1): tau = 1, empty ranges give 1
  Environment desc(0, std::vector<double>(5, 4.0 / 5.0));
  const auto me2 = m_extremes(desc, 0, 5);
  CHECK(me2.tau == 1);
  CHECK(me2.m_minus == 1.0);

  for (int e = 0; e < 25; ++e) {
    const QEnvironment q =
        sample_Q_blocks(fixture(), 1, 900 + static_cast<unsigned>(e));
    const std::int64_t nu = q.ladder.nu[1];
    const auto me = m_extremes(q.env, 0, nu);
    // brute force from the definitions
    std::vector<double> prefix(static_cast<std::size_t>(nu));
    double run = 0.0;
    for (std::int64_t k = 0; k < nu; ++k) {
      run += q.env.log_rho(k);
      prefix[static_cast<std::size_t>(k)] = run;  // log Pi_{0,k}
    }
    std::int64_t tau = 1;
    for (std::int64_t k = 1; k <= nu; ++k)
      if (prefix[static_cast<std::size_t>(k - 1)] >=
          prefix[static_cast<std::size_t>(tau - 1)] - 1e-12)
        tau = k;
    CHECK(me.tau == tau);
    double mminus = 0.0;  // log, capped at log 1 = 0
    for (std::int64_t i = 1; i < tau; ++i)
      for (std::int64_t j = i; j < tau; ++j)
        mminus = std::min(mminus, log_pi(q.env, i, j));
    CHECK(std::log(me.m_minus) == doctest::Approx(mminus).epsilon(1e-10));
    double mplus = 0.0;  // log, floored at 0
    for (std::int64_t i = tau; i < nu; ++i)
      for (std::int64_t j = i; j < nu; ++j)
        mplus = std::max(mplus, log_pi(q.env, i, j));
    CHECK(std::log(me.m_plus) == doctest::Approx(mplus).epsilon(1e-10));
    CHECK(me.m_minus <= 1.0 + 1e-12);
    CHECK(me.m_plus >= 1.0 - 1e-12);
  }
}

TEST_CASE("laplace bounds: closed forms and ordering on a lambda grid") {
  BlockMoments bm;
  bm.mu = 10.0;
  bm.sigma2 = 100.0;  // sigma^2 = mu^2: the exponential limit shape
  bm.E_S = 0.0;
  for (double lam : {0.0, 0.1, 0.5, 1.0, 2.0, 4.0}) {
    const auto lb = laplace_bounds(bm, lam);
    CHECK(lb.lower == doctest::Approx(1.0 / (1.0 + lam)).epsilon(1e-12));
    if (std::isfinite(lb.upper))
      CHECK(lb.upper == doctest::Approx(1.0 / (1.0 + lam)).epsilon(1e-12));
  }
  const auto at0 = laplace_bounds(bm, 0.0);
  CHECK(at0.lower == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(at0.upper == doctest::Approx(1.0).epsilon(1e-14));
  CHECK_THROWS_AS(laplace_bounds(bm, -0.5), std::domain_error);

  for (int e = 0; e < 100; ++e) {
    const QEnvironment q =
        sample_Q_blocks(fixture(), 1, 1500 + static_cast<unsigned>(e));
    const auto moments =
        block_moments(q.env, q.ladder, 1, ReflectionPolicy::none());
    for (double lam = 0.0; lam <= 4.0; lam += 0.1) {
      const auto lb = laplace_bounds(moments, lam);
      if (std::isfinite(lb.upper)) CHECK(lb.lower <= lb.upper + 1e-12);
      CHECK(lb.lower <= 1.0 + 1e-12);
    }
  }
}

TEST_CASE("laplace sandwich brackets the MC estimate on a large-M block") {
  // rejection-sample a block with a visible trap
  QEnvironment q;
  for (unsigned seed = 0;; ++seed) {
    q = sample_Q_blocks(fixture(), 1, 2000 + seed);
    if (q.ladder.block_max[0] > 16.0) break;
  }
  const std::int64_t nu = q.ladder.nu[1];
  const auto bm = block_moments(q.env, q.ladder, 1, ReflectionPolicy::none());
  const auto ex = mc_excursions(q.env, nu, -1, 100000000, 100000, 3111);
  for (double lam : {0.5, 1.0, 2.0}) {
    const auto lb = laplace_bounds(bm, lam);
    double m = 0.0, m2 = 0.0;
    for (const auto& e : ex) {
      const double v = std::exp(-lam * static_cast<double>(e.total) / bm.mu);
      m += v;
      m2 += v * v;
    }
    const double n = static_cast<double>(ex.size());
    m /= n;
    const double se = std::sqrt((m2 / n - m * m) / (n - 1.0));
    CHECK(m >= lb.lower - 3.0 * se);
    if (std::isfinite(lb.upper)) CHECK(m <= lb.upper + 3.0 * se);
  }
}

TEST_CASE("excursion identities (mean and variance) within MC bands") {
  for (unsigned e = 0; e < 5; ++e) {
    const QEnvironment q = sample_Q_blocks(fixture(), 1, 4000 + e);
    const std::int64_t nu = q.ladder.nu[1];
    const auto bm =
        block_moments(q.env, q.ladder, 1, ReflectionPolicy::none());
    const double p = bm.p_success;
    const double en = (1.0 - p) / p;  // E N, geometric failure count
    const auto ex = mc_excursions(q.env, nu, -1, 100000000, 100000, 5000 + e);
    double fsum = 0.0, f2 = 0.0;
    std::int64_t nf = 0;
    double ssum = 0.0, s2 = 0.0;
    for (const auto& smp : ex) {
      for (auto t : smp.failure_times) {
        fsum += static_cast<double>(t);
        f2 += static_cast<double>(t) * static_cast<double>(t);
        ++nf;
      }
      ssum += static_cast<double>(smp.success_time);
      s2 += static_cast<double>(smp.success_time) *
            static_cast<double>(smp.success_time);
    }
    const double npaths = static_cast<double>(ex.size());
    const double smean = ssum / npaths;
    const double svar = s2 / npaths - smean * smean;
    // success-excursion mean against the exact conditioned value
    CHECK(std::fabs(smean - bm.E_S) <
          3.0 * std::sqrt(svar / npaths) + 1e-9);
    if (nf == 0) {
      CHECK(bm.mu == doctest::Approx(bm.E_S).epsilon(1e-6));
      continue;
    }
    const double f1 = fsum / static_cast<double>(nf);
    const double fvar =
        f2 / static_cast<double>(nf) - f1 * f1;
    const double se_f = std::sqrt(fvar / static_cast<double>(nf));
    // (mean identity) E T = E S + E N * E F_1
    CHECK(std::fabs(bm.mu - (bm.E_S + en * f1)) <
          3.0 * (en * se_f + std::sqrt(svar / npaths)) + 1e-9);
    // (variance identity) Var T = Var S + E N Var F + Var N (E F)^2
    // with Var N = (1-p)/p^2 for the geometric count
    const double vn = (1.0 - p) / (p * p);
    const double rhs = svar + en * fvar + vn * f1 * f1;
    // all MC pieces: accept a generous 10-sigma-scale band via bootstrap-free
    // delta bound (dominant error from fvar and svar)
    const double tol =
        10.0 * (en * fvar / std::sqrt(static_cast<double>(nf)) +
                svar / std::sqrt(npaths) + vn * 2.0 * f1 * se_f) +
        1e-6;
    CHECK(std::fabs(bm.sigma2 - rhs) < tol + 0.05 * bm.sigma2);
  }
}

TEST_CASE("block variance additivity and M^2 lower bound") {
  const QEnvironment q = sample_Q_blocks(fixture(), 40, 7777);
  const std::int64_t b = 10;
  const double v_ac = sum_block_variances(q.env, q.ladder, 15, 35, b);
  const double v_ab = sum_block_variances(q.env, q.ladder, 15, 25, b);
  const double v_bc = sum_block_variances(q.env, q.ladder, 25, 35, b);
  CHECK(v_ac == doctest::Approx(v_ab + v_bc).epsilon(1e-12));
  double max_m2 = 0.0;
  for (std::int64_t i = 16; i <= 35; ++i) {
    const double m = q.ladder.block_max[static_cast<std::size_t>(i - 1)];
    max_m2 = std::max(max_m2, m * m);
  }
  CHECK(v_ac >= max_m2);
  // insufficient left context is an error naming the shortfall
  CHECK_THROWS_AS(sum_block_variances(q.env, q.ladder, 0, 5, 20),
                  std::out_of_range);
}

TEST_CASE("block_moments matches its parts") {
  const QEnvironment q = sample_Q_blocks(fixture(), 12, 321);
  const auto bm = block_moments(q.env, q.ladder, 6, ReflectionPolicy::blocks(3));
  const auto& nu = q.ladder.nu;
  const auto cm =
      crossing_moments_with_cutoff(q.env, nu[5], nu[6], nu[3]);
  CHECK(bm.mu == doctest::Approx(cm.mean).epsilon(1e-12));
  CHECK(bm.sigma2 == doctest::Approx(cm.variance).epsilon(1e-12));
  CHECK(bm.M ==
        doctest::Approx(q.ladder.block_max[5]).epsilon(1e-12));
  CHECK(bm.nu_len == q.ladder.block_len[5]);
  CHECK(bm.p_success ==
        doctest::Approx(success_probability(q.env, nu[5], bm.nu_len))
            .epsilon(1e-12));
}

TEST_CASE("variance/mean^2 approaches 1 on large-M blocks") {
  // conditioning on bigger M drives sigma^2/mu^2 toward 1 (statistically)
  std::vector<double> small_dev, big_dev;
  for (unsigned e = 0; e < 8000; ++e) {
    const QEnvironment q = sample_Q_blocks(fixture(), 1, 60000 + e);
    const double M = q.ladder.block_max[0];
    const auto bm =
        block_moments(q.env, q.ladder, 1, ReflectionPolicy::none());
    const double dev = std::fabs(bm.sigma2 / (bm.mu * bm.mu) - 1.0);
    if (M > 16.0)
      big_dev.push_back(dev);
    else if (M < 1.5)
      small_dev.push_back(dev);
  }
  REQUIRE(big_dev.size() > 5);
  REQUIRE(small_dev.size() > 5);
  auto median = [](std::vector<double> v) {
    std::sort(v.begin(), v.end());
    return v[v.size() / 2];
  };
  CHECK(median(big_dev) < 0.2);
  CHECK(median(big_dev) < median(small_dev));
}
