// Copyright 2026 The entwit Authors
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

#pragma once

// Outcome statistics and decision theory for the witnessing and
// discrimination problems: exact outcome distributions (log space), flat-prior
// posteriors, decision sets, success probabilities and Chernoff bounds.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/beta.hpp>

#include "entwit/errors.hpp"
#include "entwit/state_model.hpp"

namespace entwit {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// ---------------------------------------------------------------------------
// Log-space helpers.

inline double log_choose(int n, int k) {
  if (k < 0 || k > n) return kNegInf;
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

// k * log(x) with the 0 * log(0) = 0 convention.
inline double xlogy(int k, double x) {
  if (k == 0) return 0.0;
  return x > 0.0 ? k * std::log(x) : kNegInf;
}

// log of C(n,k) q^k (1-q)^(n-k).
inline double log_binomial_pmf(int n, int k, double q) {
  if (k < 0 || k > n) return kNegInf;
  return log_choose(n, k) + xlogy(k, q) + xlogy(n - k, 1.0 - q);
}

inline double log_sum_exp(std::span<const double> xs) {
  double mx = kNegInf;
  for (double x : xs) mx = std::max(mx, x);
  if (mx == kNegInf) return kNegInf;
  double s = 0.0;
  for (double x : xs) s += std::exp(x - mx);
  return mx + std::log(s);
}

// ---------------------------------------------------------------------------
// Models.

// Copy-by-copy pass/fail test with spectral gap nu: a copy of fidelity F
// passes with probability 1 - (1-F) nu.
struct MeasurementStrategy {
  double nu = 1.0;

  static constexpr MeasurementStrategy amplitude_damping() { return {1.0}; }
  static constexpr MeasurementStrategy unknown_state() { return {2.0 / 3.0}; }

  double pass_probability(double F) const { return 1.0 - (1.0 - F) * nu; }
  friend bool operator==(const MeasurementStrategy&,
                         const MeasurementStrategy&) = default;
};

inline MeasurementStrategy strategy_for(Family f) {
  return f == Family::AmplitudeDamping ? MeasurementStrategy::amplitude_damping()
                                       : MeasurementStrategy::unknown_state();
}

// j = number of failing copies (or counted |01> errors), j in [0, n].
struct BinomialCount {
  MeasurementStrategy strategy;
  friend bool operator==(const BinomialCount&, const BinomialCount&) = default;
};

// j = #type1 - #type2 on Werner copies, j in [-n, n]. Per copy the counter is
// invariant with probability A = (1+2F)/3 and shifts by +-1 with (1-A)/2.
struct DifferenceCount {
  friend bool operator==(const DifferenceCount&, const DifferenceCount&) = default;
};

// Statistic = number of odd-parity blocks among n blocks of size r. Each pair
// keeps its amplitude bit with probability A = 1 - (1-F) nu.
struct BlockParity {
  int block_size = 2;
  MeasurementStrategy keep = MeasurementStrategy::unknown_state();

  double even_probability(double F) const {
    const double a = keep.pass_probability(F);
    return 0.5 * (1.0 + std::pow(2.0 * a - 1.0, block_size));
  }
  friend bool operator==(const BlockParity&, const BlockParity&) = default;
};

using OutcomeModel = std::variant<BinomialCount, DifferenceCount, BlockParity>;

inline std::string model_name(const OutcomeModel& m) {
  return std::visit(
      [](const auto& x) -> std::string {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, BinomialCount>) {
          return x.strategy.nu == 1.0 ? "binomial(nu=1)" : "binomial(nu=2/3)";
        } else if constexpr (std::is_same_v<T, DifferenceCount>) {
          return "difference";
        } else {
          return "block_parity(r=" + std::to_string(x.block_size) + ")";
        }
      },
      m);
}

inline std::pair<int, int> support_of(const OutcomeModel& m, int n) {
  if (std::holds_alternative<DifferenceCount>(m)) return {-n, n};
  return {0, n};
}

// ---------------------------------------------------------------------------
// Distributions.

struct OutcomeDistribution {
  int lo = 0;
  std::vector<double> log_probs;

  int hi() const { return lo + static_cast<int>(log_probs.size()) - 1; }
  std::size_t size() const { return log_probs.size(); }
  bool contains(int j) const { return j >= lo && j <= hi(); }
  double log_prob(int j) const {
    return contains(j) ? log_probs[static_cast<std::size_t>(j - lo)] : kNegInf;
  }
  double prob(int j) const { return std::exp(log_prob(j)); }
  std::vector<double> probs() const {
    std::vector<double> out(log_probs.size());
    std::transform(log_probs.begin(), log_probs.end(), out.begin(),
                   [](double x) { return std::exp(x); });
    return out;
  }
  double total() const {
    double s = 0.0;
    for (double x : log_probs) s += std::exp(x);
    return s;
  }
  double mean() const {
    double s = 0.0;
    for (int j = lo; j <= hi(); ++j) s += j * prob(j);
    return s;
  }
};

namespace detail {

inline double log_difference_pmf(int n, int j, double a) {
  const double s = (1.0 - a) / 2.0;
  std::vector<double> terms;
  for (int l = std::max(0, -j); l + (l + j) <= n; ++l) {
    const int k = l + j;
    const int i = n - k - l;
    terms.push_back(std::lgamma(n + 1.0) - std::lgamma(i + 1.0) -
                    std::lgamma(k + 1.0) - std::lgamma(l + 1.0) + xlogy(i, a) +
                    xlogy(k + l, s));
  }
  return log_sum_exp(terms);
}

}  // namespace detail

// log Pr(j | F) for a single outcome.
inline double log_likelihood(const OutcomeModel& model, int n, int j, double F) {
  return std::visit(
      [&](const auto& m) -> double {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, BinomialCount>) {
          return log_binomial_pmf(n, j, 1.0 - m.strategy.pass_probability(F));
        } else if constexpr (std::is_same_v<T, DifferenceCount>) {
          if (j < -n || j > n) return kNegInf;
          return detail::log_difference_pmf(n, j, (1.0 + 2.0 * F) / 3.0);
        } else {
          const double pi0 = std::clamp(m.even_probability(F), 0.0, 1.0);
          return log_binomial_pmf(n, j, 1.0 - pi0);
        }
      },
      model);
}

inline OutcomeDistribution outcome_distribution(const OutcomeModel& model, int n,
                                                Fidelity F) {
  if (n < 1) throw std::invalid_argument("ensemble size must be >= 1");
  auto [lo, hi] = support_of(model, n);
  OutcomeDistribution out;
  out.lo = lo;
  out.log_probs.reserve(static_cast<std::size_t>(hi - lo + 1));
  for (int j = lo; j <= hi; ++j) {
    out.log_probs.push_back(log_likelihood(model, n, j, F.value()));
  }
  return out;
}

// Model used for the statistic of each protocol on a given family.
enum class ProtocolId { P0, P1, P2, P3 };

inline std::string_view protocol_name(ProtocolId p) {
  switch (p) {
    case ProtocolId::P0: return "p0";
    case ProtocolId::P1: return "p1";
    case ProtocolId::P2: return "p2";
    case ProtocolId::P3: return "p3";
  }
  return "?";
}

inline ProtocolId parse_protocol(std::string_view s) {
  if (s == "p0" || s == "P0") return ProtocolId::P0;
  if (s == "p1" || s == "P1") return ProtocolId::P1;
  if (s == "p2" || s == "P2") return ProtocolId::P2;
  if (s == "p3" || s == "P3") return ProtocolId::P3;
  throw std::invalid_argument("unknown protocol '" + std::string(s) + "'");
}

// P0 measures copies directly; P1/P2 read the ENG counter, which counts
// errors exactly only for amplitude damping and tracks a type-1/type-2
// difference for Werner states; P3 reads block parities.
inline OutcomeModel model_for(ProtocolId protocol, Family family, int block_size = 2) {
  switch (protocol) {
    case ProtocolId::P0:
      return BinomialCount{strategy_for(family)};
    case ProtocolId::P1:
    case ProtocolId::P2:
      if (family == Family::AmplitudeDamping) {
        return BinomialCount{MeasurementStrategy::amplitude_damping()};
      }
      if (family == Family::Werner) return DifferenceCount{};
      throw UnsupportedCombination(std::string(protocol_name(protocol)) +
                                   " has no counting model for family " +
                                   std::string(family_name(family)));
    case ProtocolId::P3:
      if (block_size < 2) throw std::invalid_argument("block size must be >= 2");
      return BlockParity{block_size, family == Family::Dephasing
                                         ? MeasurementStrategy{1.0}
                                         : MeasurementStrategy::unknown_state()};
  }
  throw std::invalid_argument("unknown protocol");
}

// Rejects explicit model/family pairings the counter cannot realize.
inline void check_model_family(const OutcomeModel& model, Family family) {
  if (const auto* b = std::get_if<BinomialCount>(&model)) {
    if (b->strategy.nu == 1.0 && family != Family::AmplitudeDamping) {
      throw UnsupportedCombination(
          "exact error counting (nu=1) is only valid for amplitude damping");
    }
  }
  if (std::holds_alternative<DifferenceCount>(model) && family != Family::Werner) {
    throw UnsupportedCombination("difference statistic is defined for Werner states");
  }
}

// ---------------------------------------------------------------------------
// Posterior.

using PriorDensity = std::function<double(double)>;

namespace detail {

// Adaptive Gauss-Kronrod on equal panels so narrow likelihood peaks are
// never stepped over.
template <class Fn>
double integrate_panels(Fn&& f, double a, double b, int panels = 64) {
  if (b <= a) return 0.0;
  double sum = 0.0;
  const double h = (b - a) / panels;
  for (int i = 0; i < panels; ++i) {
    const double x0 = a + i * h;
    const double x1 = (i + 1 == panels) ? b : x0 + h;
    sum += boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
        f, x0, x1, 8, 1e-11);
  }
  return sum;
}

}  // namespace detail

// Pr(F > F0 | j) under a flat prior (or `prior` when given). The likelihood is
// normalized by its evidence integral.
inline double posterior_above(int j, int n, Fidelity F0, const OutcomeModel& model,
                              const PriorDensity& prior = {}) {
  auto [lo, hi] = support_of(model, n);
  if (j < lo || j > hi) throw std::out_of_range("outcome outside support");
  if (F0.value() == 0.0) return 1.0;
  if (F0.value() == 1.0) return 0.0;

  if (!prior) {
    if (const auto* b = std::get_if<BinomialCount>(&model)) {
      // Likelihood is p^(n-j) (1-p)^j with p = 1 - (1-F) nu linear in F, so
      // the posterior is a Beta(n-j+1, j+1) law in p restricted to [1-nu, 1].
      const double nu = b->strategy.nu;
      const double a = n - j + 1.0;
      const double bb = j + 1.0;
      const double p0 = b->strategy.pass_probability(F0.value());
      const double upper = boost::math::ibetac(a, bb, p0);
      const double total = nu == 1.0 ? 1.0 : boost::math::ibetac(a, bb, 1.0 - nu);
      return total > 0.0 ? std::clamp(upper / total, 0.0, 1.0) : 0.0;
    }
  }

  auto density = [&](double F) {
    const double w = prior ? prior(F) : 1.0;
    return w * std::exp(log_likelihood(model, n, j, F));
  };
  const double above = detail::integrate_panels(density, F0.value(), 1.0);
  const double below = detail::integrate_panels(density, 0.0, F0.value());
  const double total = above + below;
  return total > 0.0 ? std::clamp(above / total, 0.0, 1.0) : 0.0;
}

// ---------------------------------------------------------------------------
// Witnessing.

struct DecisionRule {
  OutcomeModel model;
  int n = 1;
  Fidelity F0;
  std::optional<double> delta;  // empty for the fixed-cut rule
  int lo = 0;
  std::vector<char> sigma;  // sigma[j - lo] != 0  <=>  j maps to "F > F0"

  bool contains(int j) const {
    const int idx = j - lo;
    return idx >= 0 && idx < static_cast<int>(sigma.size()) && sigma[idx] != 0;
  }
  std::vector<int> members() const {
    std::vector<int> out;
    for (std::size_t i = 0; i < sigma.size(); ++i) {
      if (sigma[i]) out.push_back(lo + static_cast<int>(i));
    }
    return out;
  }
};

inline DecisionRule build_sigma(int n, Fidelity F0, double delta,
                                const OutcomeModel& model,
                                const PriorDensity& prior = {}) {
  if (!(delta > 0.0 && delta < 1.0)) {
    throw std::invalid_argument("delta must lie in (0, 1)");
  }
  if (n < 1) throw std::invalid_argument("ensemble size must be >= 1");
  auto [lo, hi] = support_of(model, n);
  DecisionRule rule{model, n, F0, delta, lo, {}};
  rule.sigma.reserve(static_cast<std::size_t>(hi - lo + 1));
  for (int j = lo; j <= hi; ++j) {
    rule.sigma.push_back(posterior_above(j, n, F0, model, prior) > delta);
  }
  return rule;
}

// Fixed cut: "above" iff j < n (1-F0) nu.
inline DecisionRule threshold_cut_rule(int n, Fidelity F0, MeasurementStrategy s) {
  DecisionRule rule{BinomialCount{s}, n, F0, std::nullopt, 0, {}};
  const double cut = n * (1.0 - F0.value()) * s.nu;
  for (int j = 0; j <= n; ++j) rule.sigma.push_back(j < cut);
  return rule;
}

struct WitnessSuccess {
  double value = 0.0;
  bool at_boundary = false;  // F == F0 exactly; reported on the "above" branch
};

inline double sigma_mass(const OutcomeDistribution& dist, const DecisionRule& rule) {
  double s = 0.0;
  for (int j = dist.lo; j <= dist.hi(); ++j) {
    if (rule.contains(j)) s += dist.prob(j);
  }
  return s;
}

inline WitnessSuccess success_probability_witness(Fidelity F, const DecisionRule& rule) {
  const auto dist = outcome_distribution(rule.model, rule.n, F);
  const double in_sigma = std::clamp(sigma_mass(dist, rule), 0.0, 1.0);
  if (F.value() >= rule.F0.value()) {
    return {in_sigma, F.value() == rule.F0.value()};
  }
  return {1.0 - in_sigma, false};
}

// ---------------------------------------------------------------------------
// Discrimination.

struct DiscriminationRule {
  OutcomeModel model;
  int n = 1;
  Fidelity F1;
  Fidelity F2;
  int lo = 0;
  std::vector<char> sigma1;  // outcomes declared F1; the rest declare F2

  bool declares_first(int j) const {
    const int idx = j - lo;
    return idx >= 0 && idx < static_cast<int>(sigma1.size()) && sigma1[idx] != 0;
  }
};

// Likelihood-ratio partition; ties go to F1.
inline DiscriminationRule discrimination_rule(int n, Fidelity F1, Fidelity F2,
                                              const OutcomeModel& model) {
  if (!(F1.value() > F2.value())) throw std::invalid_argument("need F1 > F2");
  const auto d1 = outcome_distribution(model, n, F1);
  const auto d2 = outcome_distribution(model, n, F2);
  DiscriminationRule rule{model, n, F1, F2, d1.lo, {}};
  for (int j = d1.lo; j <= d1.hi(); ++j) {
    rule.sigma1.push_back(d1.log_prob(j) >= d2.log_prob(j));
  }
  return rule;
}

inline double success_probability_discriminate(const DiscriminationRule& rule,
                                               double eta1 = 0.5, double eta2 = 0.5) {
  if (eta1 < 0.0 || eta2 < 0.0 || std::abs(eta1 + eta2 - 1.0) > 1e-12) {
    throw std::invalid_argument("priors must be non-negative and sum to 1");
  }
  const auto d1 = outcome_distribution(rule.model, rule.n, rule.F1);
  const auto d2 = outcome_distribution(rule.model, rule.n, rule.F2);
  double s1 = 0.0;
  double s2 = 0.0;
  for (int j = d1.lo; j <= d1.hi(); ++j) {
    if (rule.declares_first(j)) {
      s1 += d1.prob(j);
    } else {
      s2 += d2.prob(j);
    }
  }
  return eta1 * s1 + eta2 * s2;
}

inline double total_variation(const OutcomeDistribution& a, const OutcomeDistribution& b) {
  const int lo = std::min(a.lo, b.lo);
  const int hi = std::max(a.hi(), b.hi());
  double s = 0.0;
  for (int j = lo; j <= hi; ++j) s += std::abs(a.prob(j) - b.prob(j));
  return 0.5 * s;
}

// ---------------------------------------------------------------------------
// Chernoff-Hoeffding.

// Natural-log Kullback-Leibler divergence D(S || Q).
inline double kl_divergence(std::span<const double> S, std::span<const double> Q) {
  if (S.size() != Q.size()) throw std::invalid_argument("support size mismatch");
  double d = 0.0;
  for (std::size_t x = 0; x < S.size(); ++x) {
    if (S[x] <= 0.0) continue;
    if (Q[x] <= 0.0) return std::numeric_limits<double>::infinity();
    d += S[x] * std::log(S[x] / Q[x]);
  }
  return d;
}

inline double kl_bernoulli(double a, double b) {
  const double s[2] = {a, 1.0 - a};
  const double q[2] = {b, 1.0 - b};
  return kl_divergence(s, q);
}

// Lower bound 1 - exp(-n D(Ber(q0) || Ber(q))) on the success probability of
// the fixed-cut rule, with q0 = (1-F0) nu the cut failure rate and q the
// failure rate at F.
inline double chernoff_bound(int n, Fidelity F, Fidelity F0, MeasurementStrategy s) {
  const double q0 = (1.0 - F0.value()) * s.nu;
  const double q = 1.0 - s.pass_probability(F.value());
  if (q == q0) return 0.0;
  const double D = kl_bernoulli(q0, q);
  return std::max(0.0, 1.0 - std::exp(-n * D));
}

}  // namespace entwit
