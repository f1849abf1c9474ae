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

#include "rwre/environment.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>

#include "rwre/numeric.hpp"

namespace rwre {

namespace {

// 64-point Gauss-Legendre rule mapped to (0,1), shared by the beta moments.
struct BetaQuadrature {
  std::vector<double> x, w;
  BetaQuadrature() {
    gauss_legendre(64, x, w);
    for (std::size_t i = 0; i < x.size(); ++i) {
      x[i] = 0.5 * (x[i] + 1.0);
      w[i] *= 0.5;
    }
  }
};

const BetaQuadrature& beta_quad() {
  static const BetaQuadrature q;
  return q;
}

template <typename F>
double beta_expectation(double alpha, double beta, const F& f) {
  const BetaQuadrature& q = beta_quad();
  const double log_norm =
      std::lgamma(alpha + beta) - std::lgamma(alpha) - std::lgamma(beta);
  double acc = 0.0;
  for (std::size_t i = 0; i < q.x.size(); ++i) {
    const double w = q.x[i];
    const double log_pdf =
        log_norm + (alpha - 1.0) * std::log(w) + (beta - 1.0) * std::log1p(-w);
    acc += q.w[i] * f(w) * std::exp(log_pdf);
  }
  return acc;
}

void check_prob_open(double p, const char* what) {
  if (!(p > 0.0 && p < 1.0))
    throw std::invalid_argument(std::string(what) +
                                " must lie strictly inside (0,1)");
}

}  // namespace

OmegaDistribution OmegaDistribution::two_point(double omega_a, double omega_b,
                                               double q) {
  OmegaDistribution d;
  d.kind_ = Kind::kTwoPoint;
  d.a_ = omega_a;
  d.b_ = omega_b;
  d.q_ = q;
  d.validate();
  return d;
}

OmegaDistribution OmegaDistribution::beta(double alpha, double beta) {
  OmegaDistribution d;
  d.kind_ = Kind::kBeta;
  d.a_ = alpha;
  d.b_ = beta;
  d.validate();
  return d;
}

OmegaDistribution OmegaDistribution::discrete(
    std::vector<std::pair<double, double>> atoms) {
  OmegaDistribution d;
  d.kind_ = Kind::kDiscrete;
  d.atoms_ = std::move(atoms);
  d.validate();
  return d;
}

void OmegaDistribution::validate() const {
  switch (kind_) {
    case Kind::kTwoPoint:
      check_prob_open(a_, "omega_a");
      check_prob_open(b_, "omega_b");
      if (!(q_ >= 0.0 && q_ <= 1.0))
        throw std::invalid_argument("q must lie in [0,1]");
      break;
    case Kind::kBeta:
      if (!(a_ > 0.0) || !(b_ > 0.0))
        throw std::invalid_argument("beta parameters must be positive");
      break;
    case Kind::kDiscrete: {
      if (atoms_.empty())
        throw std::invalid_argument("discrete law needs at least one atom");
      double total = 0.0;
      for (const auto& [w, p] : atoms_) {
        check_prob_open(w, "discrete support point");
        if (p < 0.0) throw std::invalid_argument("negative atom weight");
        total += p;
      }
      if (std::fabs(total - 1.0) > 1e-12)
        throw std::invalid_argument("discrete weights must sum to 1");
      break;
    }
  }
}

double OmegaDistribution::mean_log_rho() const {
  auto log_rho = [](double w) { return std::log1p(-w) - std::log(w); };
  switch (kind_) {
    case Kind::kTwoPoint:
      return q_ * log_rho(a_) + (1.0 - q_) * log_rho(b_);
    case Kind::kBeta:
      return beta_expectation(a_, b_, log_rho);
    case Kind::kDiscrete: {
      double acc = 0.0;
      for (const auto& [w, p] : atoms_) acc += p * log_rho(w);
      return acc;
    }
  }
  return 0.0;
}

double OmegaDistribution::moment_rho(double gamma) const {
  auto rho_pow = [gamma](double w) {
    return std::exp(gamma * (std::log1p(-w) - std::log(w)));
  };
  switch (kind_) {
    case Kind::kTwoPoint:
      return q_ * rho_pow(a_) + (1.0 - q_) * rho_pow(b_);
    case Kind::kBeta:
      // E rho^gamma = B(alpha-gamma, beta+gamma)/B(alpha,beta), finite only
      // for gamma < alpha; the quadrature diverges there too, so cut it off.
      if (gamma >= a_) return kInf;
      return beta_expectation(a_, b_, rho_pow);
    case Kind::kDiscrete: {
      double acc = 0.0;
      for (const auto& [w, p] : atoms_) acc += p * rho_pow(w);
      return acc;
    }
  }
  return 0.0;
}

double OmegaDistribution::sample(RngStream& rng) const {
  switch (kind_) {
    case Kind::kTwoPoint:
      return rng.bernoulli(q_) ? a_ : b_;
    case Kind::kBeta:
      return rng.beta(a_, b_);
    case Kind::kDiscrete: {
      double u = rng.uniform();
      for (const auto& [w, p] : atoms_) {
        if (u < p) return w;
        u -= p;
      }
      return atoms_.back().first;
    }
  }
  return 0.5;
}

Environment::Environment(std::int64_t left_index, std::vector<double> omegas)
    : left_(left_index), omegas_(std::move(omegas)) {
  for (double w : omegas_)
    if (!(w > 0.0 && w <= 1.0))
      throw std::invalid_argument("site probability outside (0,1]");
}

double Environment::log_rho(std::int64_t i) const {
  const double w = omega(i);
  if (w == 1.0) return kNegInf;  // reflection site
  return std::log1p(-w) - std::log(w);
}

void Environment::set_reflection(std::int64_t i) {
  check(i);
  omegas_[static_cast<std::size_t>(i - left_)] = 1.0;
}

void Environment::save(std::ostream& os) const {
  os << "RWREENV 1\n" << left_ << " " << omegas_.size() << "\n";
  os.precision(17);
  for (double w : omegas_) os << w << "\n";
}

Environment Environment::load(std::istream& is) {
  std::string magic;
  int version = 0;
  is >> magic >> version;
  if (magic != "RWREENV" || version != 1)
    throw std::runtime_error("not a version-1 environment file");
  std::int64_t left = 0;
  std::size_t n = 0;
  is >> left >> n;
  std::vector<double> omegas(n);
  for (auto& w : omegas) is >> w;
  if (!is) throw std::runtime_error("truncated environment file");
  return Environment(left, std::move(omegas));
}

Environment sample_environment(const OmegaDistribution& dist, std::int64_t lo,
                               std::int64_t hi, std::uint64_t seed,
                               double ellipticity_floor) {
  dist.validate();
  if (lo > hi) throw std::invalid_argument("empty range: lo > hi");
  RngStream rng(seed, 0);
  std::vector<double> omegas;
  omegas.reserve(static_cast<std::size_t>(hi - lo + 1));
  for (std::int64_t i = lo; i <= hi; ++i) {
    double w = dist.sample(rng);
    w = std::clamp(w, ellipticity_floor, 1.0 - ellipticity_floor);
    omegas.push_back(w);
  }
  return Environment(lo, std::move(omegas));
}

double rho(const Environment& env, std::int64_t i) { return env.rho(i); }

double log_pi(const Environment& env, std::int64_t i, std::int64_t j) {
  if (i > j)
    throw std::invalid_argument(
        "log_pi: i > j (empty product, handle Pi = 1 at the call site)");
  double acc = 0.0;
  for (std::int64_t k = i; k <= j; ++k) acc += env.log_rho(k);
  return acc;
}

double pi(const Environment& env, std::int64_t i, std::int64_t j) {
  return std::exp(log_pi(env, i, j));
}

double log_w_sum(const Environment& env, std::int64_t i, std::int64_t j) {
  if (i > j) throw std::invalid_argument("log_w_sum: i > j");
  // W_{i,j} = rho_j (W_{i,j-1} + 1), kept as logs.
  double lw = kNegInf;
  for (std::int64_t k = i; k <= j; ++k)
    lw = env.log_rho(k) + logaddexp(lw, 0.0);
  return lw;
}

double w_sum(const Environment& env, std::int64_t i, std::int64_t j) {
  return std::exp(log_w_sum(env, i, j));
}

double w_tail(const Environment& env, std::int64_t j, std::int64_t cutoff) {
  if (cutoff > j) throw std::invalid_argument("w_tail: cutoff > j");
  if (cutoff == j) return 0.0;
  return w_sum(env, cutoff + 1, j);
}

LadderDecomposition ladder_locations(const Environment& env,
                                     std::int64_t max_blocks) {
  if (env.left_index() > 0)
    throw std::invalid_argument("ladder scan requires a window covering 0");
  LadderDecomposition lad;
  lad.nu.push_back(0);
  double sum = 0.0;       // log Pi_{nu_{i-1}, n-1}
  double max_log = kNegInf;  // running max of the prefix, gives M_i
  for (std::int64_t n = 1; n <= env.right_index(); ++n) {
    sum += env.log_rho(n - 1);
    max_log = std::max(max_log, sum);
    if (sum < 0.0) {
      lad.block_len.push_back(n - lad.nu.back());
      lad.block_max.push_back(std::exp(max_log));
      lad.nu.push_back(n);
      if (lad.n_blocks() == max_blocks) return lad;
      sum = 0.0;
      max_log = kNegInf;
    }
  }
  throw PartialLadderError(
      "environment window exhausted after " +
          std::to_string(lad.n_blocks()) + " of " +
          std::to_string(max_blocks) + " ladder blocks",
      std::move(lad));
}

QEnvironment sample_Q_blocks(const OmegaDistribution& dist,
                             std::int64_t n_blocks, std::uint64_t seed,
                             std::int64_t block_cap,
                             double ellipticity_floor) {
  dist.validate();
  if (!dist.transient_right())
    throw std::invalid_argument("distribution is not transient to the right");
  RngStream rng(seed, 0);
  QEnvironment out;
  std::vector<double> omegas;
  out.ladder.nu.push_back(0);
  for (std::int64_t b = 0; b < n_blocks; ++b) {
    double sum = 0.0, max_log = kNegInf;
    std::int64_t len = 0;
    for (;;) {
      double w = dist.sample(rng);
      w = std::clamp(w, ellipticity_floor, 1.0 - ellipticity_floor);
      omegas.push_back(w);
      sum += std::log1p(-w) - std::log(w);
      max_log = std::max(max_log, sum);
      ++len;
      if (sum < 0.0) break;
      if (len >= block_cap)
        throw RunawayBlockError("block exceeded the hard length cap of " +
                                std::to_string(block_cap) + " sites");
    }
    out.ladder.block_len.push_back(len);
    out.ladder.block_max.push_back(std::exp(max_log));
    out.ladder.nu.push_back(out.ladder.nu.back() + len);
  }
  out.env = Environment(0, std::move(omegas));
  return out;
}

StabilityParams solve_s(const OmegaDistribution& dist) {
  dist.validate();
  StabilityParams p;
  p.E_rho = dist.mean_rho();
  p.E_log_rho = dist.mean_log_rho();
  if (p.E_log_rho >= 0.0)
    throw std::domain_error("E_P log rho >= 0: walk is not transient right");

  auto f = [&](double g) { return dist.moment_rho(g) - 1.0; };
  // f(0) = 0 and f is convex with f'(0) = E log rho < 0, so the nonzero
  // root is bracketed by the first grid point where f turns positive.
  double lo = 1e-6, hi = 0.0;
  bool bracketed = false;
  for (double g = 0.0078125; g <= 64.0; g *= 2.0) {
    const double fg = f(g);
    if (fg > 0.0) {
      hi = g;
      bracketed = true;
      break;
    }
    lo = g;
  }
  if (!bracketed)
    throw std::domain_error(
        "no root of E_P rho^gamma = 1 in (0,64]: distribution outside the "
        "stable regime");
  p.s = bisect(f, lo, hi, 1e-15);
  if (std::fabs(f(p.s)) > 1e-10)
    throw std::domain_error("root refinement failed to reach 1e-10 residual");
  if (p.E_rho < 1.0) p.v_P = (1.0 - p.E_rho) / (1.0 + p.E_rho);
  return p;
}

}  // namespace rwre
