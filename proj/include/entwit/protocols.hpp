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

// The four verification protocols: P0 copy-by-copy measurement, P1 error
// counting through the ENG, P2 coarse-grained readout of the counter and P3
// parity blocking. Each has an analytic run_* (exact distributions and
// success probabilities), a sample_* primitive drawing one trajectory from
// the index-level engine, and a simulate_* wrapper producing a report.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "entwit/decision_stats.hpp"
#include "entwit/errors.hpp"
#include "entwit/gate_engine.hpp"
#include "entwit/resource_model.hpp"
#include "entwit/sampling.hpp"
#include "entwit/state_model.hpp"

namespace entwit {

enum class Decision { Above, Below, First, Second };

inline std::string_view decision_name(Decision d) {
  switch (d) {
    case Decision::Above: return "above";
    case Decision::Below: return "below";
    case Decision::First: return "F1";
    case Decision::Second: return "F2";
  }
  return "?";
}

enum class ResidualKind { Consumed, TensorProduct, CorrelatedGamma, PostParityBlocks };

inline std::string_view residual_kind_name(ResidualKind k) {
  switch (k) {
    case ResidualKind::Consumed: return "consumed";
    case ResidualKind::TensorProduct: return "tensor_product";
    case ResidualKind::CorrelatedGamma: return "correlated_gamma";
    case ResidualKind::PostParityBlocks: return "post_parity_blocks";
  }
  return "?";
}

struct ResidualEnsemble {
  ResidualKind kind = ResidualKind::Consumed;
  // Mean single-copy fidelity of the retained copies, averaged over outcomes
  // (or for the observed outcome in a simulated trajectory).
  std::optional<double> reduced_fidelity;
  // Same, restricted to runs (or blocks) that ended in the "above" decision.
  std::optional<double> certified_fidelity;
  std::optional<double> auxiliary_fidelity;  // P2 recovered auxiliary
};

struct ProtocolReport {
  ProtocolId protocol = ProtocolId::P0;
  StateSpec spec = make_state(Family::Werner, 1.0);
  int ensemble_size = 0;  // n, or N for P3
  Fidelity F0;
  // Distribution of the statistic at the spec's fidelity: failures (P0), the
  // counter value (P1), the outcome M=1 / not-M=0 (P2), odd blocks (P3).
  OutcomeDistribution distribution;
  double success_probability = 0.0;
  bool at_boundary = false;
  bool efficient = true;
  std::optional<int> statistic;
  std::optional<Decision> decision;
  ResidualEnsemble residual;
  ResourceLedger ledger;
};

// ---------------------------------------------------------------------------
// Per-copy sampling.

class LabelSampler {
 public:
  explicit LabelSampler(const LabelDistribution& d)
      : dist_(d.probs.begin(), d.probs.end()) {}
  template <class URBG>
  ErrorLabel operator()(URBG& rng) {
    return static_cast<ErrorLabel>(dist_(rng));
  }

 private:
  std::discrete_distribution<int> dist_;
};

// Fidelity with Psi00 of a single labeled component.
inline double label_fidelity(ErrorLabel l) {
  switch (l) {
    case ErrorLabel::Good: return 1.0;
    case ErrorLabel::Z00:
    case ErrorLabel::Z11: return 0.5;
    default: return 0.0;
  }
}

// Labels the counter sees. Copy-by-copy measurement on anything other than
// amplitude damping acts on the Werner-depolarized copy.
inline LabelDistribution p0_labels(const StateSpec& spec) {
  if (spec.family() == Family::AmplitudeDamping) return error_label_distribution(spec);
  return error_label_distribution(depolarize(spec, DepolarizeTarget::Werner));
}

// ---------------------------------------------------------------------------
// P0.

inline void check_rule(const DecisionRule& rule, const OutcomeModel& model, int n) {
  if (!(rule.model == model)) {
    throw std::invalid_argument("decision rule was built for " + model_name(rule.model) +
                                ", protocol needs " + model_name(model));
  }
  if (rule.n != n) throw std::invalid_argument("decision rule built for a different n");
}

inline ProtocolReport run_p0(const StateSpec& spec, int n, const DecisionRule& rule) {
  const auto model = model_for(ProtocolId::P0, spec.family());
  check_rule(rule, model, n);
  ProtocolReport r;
  r.protocol = ProtocolId::P0;
  r.spec = spec;
  r.ensemble_size = n;
  r.F0 = rule.F0;
  r.distribution = outcome_distribution(model, n, spec.fidelity());
  const auto ps = success_probability_witness(spec.fidelity(), rule);
  r.success_probability = ps.value;
  r.at_boundary = ps.at_boundary;
  r.residual.kind = ResidualKind::Consumed;
  r.ledger.copies_measured = n;
  return r;
}

template <class URBG>
int sample_p0(const LabelDistribution& labels, int n, URBG& rng) {
  LabelSampler draw(labels);
  int fails = 0;
  for (int i = 0; i < n; ++i) {
    const ErrorLabel l = draw(rng);
    fails += (l == ErrorLabel::Type1 || l == ErrorLabel::Type2);
  }
  return fails;
}

template <class URBG>
ProtocolReport simulate_p0(const StateSpec& spec, int n, const DecisionRule& rule, URBG& rng) {
  ProtocolReport r = run_p0(spec, n, rule);
  const int j = sample_p0(p0_labels(spec), n, rng);
  r.statistic = j;
  r.decision = rule.contains(j) ? Decision::Above : Decision::Below;
  return r;
}

// ---------------------------------------------------------------------------
// P1.

// Smallest auxiliary dimension that keeps the counter unambiguous.
inline int minimum_counter_dimension(Family family, int n) {
  if (family == Family::AmplitudeDamping) return n + 1;
  if (family == Family::Werner) return 2 * n + 1;
  throw UnsupportedCombination("error counting is not defined for family " +
                               std::string(family_name(family)));
}

inline void check_counter_dimension(Family family, int n, int d) {
  const int need = minimum_counter_dimension(family, n);
  if (d < need) {
    throw std::invalid_argument("auxiliary dimension d=" + std::to_string(d) +
                                " too small for n=" + std::to_string(n) + " (need >= " +
                                std::to_string(need) + ")");
  }
}

// Raw counter from the register value: Werner differences live in [-n, n].
inline int counter_from_register(Family family, int n, int value, int d) {
  if (family == Family::Werner && value > n) return value - d;
  return value;
}

// Mean single-copy fidelity of the retained copies given counter value j.
// Each copy keeps its label; by symmetry the reduced state of any copy is the
// label mixture conditioned on j.
inline double residual_fidelity(const StateSpec& spec, int n, int j) {
  const double F = spec.fidelity().value();
  if (spec.family() == Family::AmplitudeDamping) {
    if (j < 0 || j > n) throw std::out_of_range("counter outside [0, n]");
    return static_cast<double>(n - j) / n;
  }
  if (spec.family() == Family::Werner) {
    // Pr(copy is counter-invariant | j) = A Pr_{n-1}(j) / Pr_n(j), and an
    // invariant copy has fidelity F / A.
    const DifferenceCount model;
    const double ln = log_likelihood(model, n, j, F);
    if (ln == kNegInf) return 0.0;
    const double ln1 = n == 1 ? (j == 0 ? 0.0 : kNegInf) : log_likelihood(model, n - 1, j, F);
    return F * std::exp(ln1 - ln);
  }
  throw UnsupportedCombination("no counter residual for family " +
                               std::string(family_name(spec.family())));
}

// Fills reduced (all outcomes) and certified (outcomes in `keep`) fidelity.
inline void fill_counter_residual(ResidualEnsemble& res, const StateSpec& spec, int n,
                                  const OutcomeDistribution& dist,
                                  const std::function<double(int)>& keep_weight) {
  double all = 0.0;
  double kept = 0.0;
  double kept_mass = 0.0;
  for (int j = dist.lo; j <= dist.hi(); ++j) {
    const double p = dist.prob(j);
    if (p <= 0.0) continue;
    const double f = residual_fidelity(spec, n, j);
    all += p * f;
    const double w = keep_weight(j);
    kept += p * w * f;
    kept_mass += p * w;
  }
  res.reduced_fidelity = all;
  if (kept_mass > 0.0) res.certified_fidelity = kept / kept_mass;
}

inline ProtocolReport run_p1(const StateSpec& spec, int n, int d, const DecisionRule& rule) {
  const auto model = model_for(ProtocolId::P1, spec.family());
  check_counter_dimension(spec.family(), n, d);
  check_rule(rule, model, n);
  ProtocolReport r;
  r.protocol = ProtocolId::P1;
  r.spec = spec;
  r.ensemble_size = n;
  r.F0 = rule.F0;
  r.efficient = spec.family() == Family::AmplitudeDamping;
  r.distribution = outcome_distribution(model, n, spec.fidelity());
  const auto ps = success_probability_witness(spec.fidelity(), rule);
  r.success_probability = ps.value;
  r.at_boundary = ps.at_boundary;
  r.residual.kind = ResidualKind::CorrelatedGamma;
  fill_counter_residual(r.residual, spec, n, r.distribution,
                        [&](int j) { return rule.contains(j) ? 1.0 : 0.0; });
  r.ledger.copies_retained = n;
  r.ledger.ebits_consumed = std::log2(static_cast<double>(d));
  return r;
}

struct CounterSample {
  int j = 0;
  double residual_fidelity = 0.0;  // mean label fidelity of this trajectory
};

template <class URBG>
CounterSample sample_counter(const StateSpec& spec, int n, int d, URBG& rng) {
  LabelSampler draw(error_label_distribution(spec));
  ErrorConfig config;
  config.labels.reserve(static_cast<std::size_t>(n));
  double fid = 0.0;
  for (int i = 0; i < n; ++i) {
    config.labels.push_back(draw(rng));
    fid += label_fidelity(config.labels.back());
  }
  const AmplitudeRegister reg = apply_eng(config, d);
  return {counter_from_register(spec.family(), n, reg.value, d), fid / n};
}

template <class URBG>
ProtocolReport simulate_p1(const StateSpec& spec, int n, int d, const DecisionRule& rule,
                           URBG& rng) {
  ProtocolReport r = run_p1(spec, n, d, rule);
  const auto s = sample_counter(spec, n, d, rng);
  r.statistic = s.j;
  r.decision = rule.contains(s.j) ? Decision::Above : Decision::Below;
  r.residual.reduced_fidelity = s.residual_fidelity;
  r.residual.certified_fidelity.reset();
  if (*r.decision == Decision::Above) r.residual.certified_fidelity = s.residual_fidelity;
  return r;
}

// ---------------------------------------------------------------------------
// P2.

// Mode of the counter distribution at F0, used to pick delta0 by default.
inline int counter_mode(const OutcomeModel& model, int n, Fidelity F0) {
  const auto dist = outcome_distribution(model, n, F0);
  int best = dist.lo;
  for (int j = dist.lo; j <= dist.hi(); ++j) {
    if (dist.log_prob(j) > dist.log_prob(best)) best = j;
  }
  return best;
}

// Index of the register group holding the mode j0 of Pr(j | F0), clamped to
// [1, m]: the transition region of outcome M then sits around j0.
inline int default_delta0(Family family, int n, int d, int m, Fidelity F0) {
  const auto model = model_for(ProtocolId::P2, family);
  const int j0 = mod(counter_mode(model, n, F0), d);
  const int width = d / m;
  return std::clamp((j0 + width - 1) / width, 1, m);
}

inline double p2_measure_prob(const OutcomeDistribution& dist, const CoarseParams& coarse) {
  double pm = 0.0;
  for (int j = dist.lo; j <= dist.hi(); ++j) {
    pm += dist.prob(j) * coarse_measure_prob(mod(j, coarse.d), coarse);
  }
  return std::clamp(pm, 0.0, 1.0);
}

inline ProtocolReport run_p2(const StateSpec& spec, int n, const CoarseParams& coarse,
                             Fidelity F0) {
  coarse.validate();
  const auto model = model_for(ProtocolId::P2, spec.family());
  check_counter_dimension(spec.family(), n, coarse.d);
  ProtocolReport r;
  r.protocol = ProtocolId::P2;
  r.spec = spec;
  r.ensemble_size = n;
  r.F0 = F0;
  r.efficient = spec.family() == Family::AmplitudeDamping;
  const auto counter = outcome_distribution(model, n, spec.fidelity());
  const double pm = p2_measure_prob(counter, coarse);
  r.distribution.lo = 0;
  r.distribution.log_probs = {std::log(1.0 - pm), std::log(pm)};
  const bool above = spec.fidelity().value() >= F0.value();
  r.success_probability = above ? pm : 1.0 - pm;
  r.at_boundary = spec.fidelity().value() == F0.value();
  r.residual.kind = ResidualKind::CorrelatedGamma;
  fill_counter_residual(r.residual, spec, n, counter, [&](int j) {
    return coarse_measure_prob(mod(j, coarse.d), coarse);
  });
  double aux = 0.0;
  for (int j = counter.lo; j <= counter.hi(); ++j) {
    aux += counter.prob(j) * coarse_recovery_fidelity(mod(j, coarse.d), coarse);
  }
  r.residual.auxiliary_fidelity = aux;
  r.ledger.copies_retained = n;
  r.ledger.ebits_consumed = std::log2(static_cast<double>(coarse.m));
  return r;
}

struct CoarseSample {
  int j = 0;
  bool outcome_m = false;
  double residual_fidelity = 0.0;
  double auxiliary_fidelity = 0.0;  // expected recovered fidelity of this branch
};

template <class URBG>
CoarseSample sample_p2(const StateSpec& spec, int n, const CoarseParams& coarse, URBG& rng) {
  const auto c = sample_counter(spec, n, coarse.d, rng);
  const int jr = mod(c.j, coarse.d);
  // The register pair holds (g(k), g(k + j)) for a uniformly random k.
  std::uniform_int_distribution<int> pick(0, coarse.d - 1);
  const int k = pick(rng);
  const int diff =
      mod(coarse_group((k + jr) % coarse.d, coarse) - coarse_group(k, coarse), coarse.m);
  const bool m = diff < coarse.delta0;
  const double pm = coarse_measure_prob(jr, coarse);
  return {c.j, m, c.residual_fidelity, m ? pm : 1.0 - pm};
}

template <class URBG>
ProtocolReport simulate_p2(const StateSpec& spec, int n, const CoarseParams& coarse,
                           Fidelity F0, URBG& rng) {
  ProtocolReport r = run_p2(spec, n, coarse, F0);
  const auto s = sample_p2(spec, n, coarse, rng);
  r.statistic = s.outcome_m ? 1 : 0;
  r.decision = s.outcome_m ? Decision::Above : Decision::Below;
  r.residual.reduced_fidelity = s.residual_fidelity;
  r.residual.certified_fidelity.reset();
  if (s.outcome_m) r.residual.certified_fidelity = s.residual_fidelity;
  r.residual.auxiliary_fidelity = s.auxiliary_fidelity;
  return r;
}

// ---------------------------------------------------------------------------
// P3.

// Bell weights entering the blocks. Dephased copies are rotated by H (x) H,
// which exchanges Psi01 and Psi10 so the phase error becomes an amplitude
// error and the bCNOT leaves the controls' fidelity untouched. Everything
// else is depolarized to Werner form first.
inline BellWeights p3_weights(const StateSpec& spec) {
  if (spec.family() == Family::Dephasing) {
    const auto w = spec.bell_weights();
    return {w[0], w[2], w[1], w[3]};
  }
  return depolarize(spec, DepolarizeTarget::Werner).bell_weights();
}

// Mean fidelity of a control after one bCNOT into a target drawn from the
// same weights: the amplitude bit is untouched and the phase picks up the
// target phase.
inline double back_action_fidelity(const BellWeights& w) {
  return w[0] * (w[0] + w[1]) + w[2] * (w[2] + w[3]);
}

inline double werner_back_action(double F) {
  const double w = (1.0 - F) / 3.0;
  return F * F + F * w + 2.0 * w * w;
}

inline int p3_blocks(int N, int r) {
  if (r < 2) throw std::invalid_argument("block size r must be >= 2");
  if (r > N) throw std::invalid_argument("block size r exceeds the ensemble size N");
  return N / r;
}

// Copies measured over `rounds` when every block keeps returning even
// parity: round t consumes one copy per block while blocks hold >= 2 copies.
inline int p3_max_measured(int N, int r, int rounds) {
  const int n = p3_blocks(N, r);
  int measured = 0;
  for (int t = 1; t <= rounds; ++t) {
    if (r - (t - 1) < 2) break;
    measured += n;
  }
  return measured;
}

inline ProtocolReport run_p3(const StateSpec& spec, int N, int r, const DecisionRule& rule,
                             int rounds = 1) {
  if (rounds < 1) throw std::invalid_argument("rounds must be >= 1");
  const int n = p3_blocks(N, r);
  const auto model = model_for(ProtocolId::P3, spec.family(), r);
  check_rule(rule, model, n);
  ProtocolReport out;
  out.protocol = ProtocolId::P3;
  out.spec = spec;
  out.ensemble_size = N;
  out.F0 = rule.F0;
  out.distribution = outcome_distribution(model, n, spec.fidelity());
  const auto ps = success_probability_witness(spec.fidelity(), rule);
  out.success_probability = ps.value;
  out.at_boundary = ps.at_boundary;
  out.residual.kind = ResidualKind::PostParityBlocks;
  const BellWeights w = p3_weights(spec);
  const double controls = back_action_fidelity(w);
  // Unblocked leftovers never interact.
  const int blocked_controls = n * (r - 1);
  const int leftover = N - n * r;
  out.residual.reduced_fidelity =
      (blocked_controls * controls + leftover * w[0]) / (blocked_controls + leftover);
  out.ledger.copies_measured = p3_max_measured(N, r, rounds);
  out.ledger.copies_retained = N - out.ledger.copies_measured;
  return out;
}

struct BlockSample {
  int odd_blocks = 0;               // round-1 statistic
  std::vector<int> odd_per_round;
  int measured = 0;
  int retained = 0;
  double mean_fidelity = 0.0;       // all retained copies
  std::optional<double> certified_fidelity;  // copies of always-even blocks
};

template <class URBG>
BlockSample sample_p3(const StateSpec& spec, int N, int r, int rounds, URBG& rng) {
  const int n = p3_blocks(N, r);
  const BellWeights w = p3_weights(spec);
  std::discrete_distribution<int> draw(w.begin(), w.end());
  std::vector<BellIndex> pairs(static_cast<std::size_t>(N));
  for (auto& p : pairs) p = BellIndex::from_flat(draw(rng));

  BlockSample s;
  std::vector<std::vector<BellIndex>> blocks(static_cast<std::size_t>(n));
  for (int b = 0; b < n; ++b) {
    blocks[static_cast<std::size_t>(b)].assign(pairs.begin() + b * r, pairs.begin() + (b + 1) * r);
  }
  std::vector<char> alive(static_cast<std::size_t>(n), 1);
  for (int t = 1; t <= rounds; ++t) {
    int odd = 0;
    bool any = false;
    for (int b = 0; b < n; ++b) {
      auto& blk = blocks[static_cast<std::size_t>(b)];
      // Later rounds only revisit blocks that have been even so far.
      if (!alive[static_cast<std::size_t>(b)] || blk.size() < 2) continue;
      any = true;
      const int parity = apply_block_parity(blk);
      blk.pop_back();
      ++s.measured;
      if (parity) {
        ++odd;
        alive[static_cast<std::size_t>(b)] = 0;
      }
    }
    if (!any) break;
    s.odd_per_round.push_back(odd);
  }
  s.odd_blocks = s.odd_per_round.front();

  double all = 0.0;
  double cert = 0.0;
  int cert_count = 0;
  for (int b = 0; b < n; ++b) {
    for (const auto& p : blocks[static_cast<std::size_t>(b)]) {
      const double f = (p == BellIndex{}) ? 1.0 : 0.0;
      all += f;
      ++s.retained;
      if (alive[static_cast<std::size_t>(b)]) {
        cert += f;
        ++cert_count;
      }
    }
  }
  for (std::size_t i = static_cast<std::size_t>(n) * r; i < pairs.size(); ++i) {
    all += (pairs[i] == BellIndex{}) ? 1.0 : 0.0;
    ++s.retained;
  }
  s.mean_fidelity = s.retained > 0 ? all / s.retained : 0.0;
  if (cert_count > 0) s.certified_fidelity = cert / cert_count;
  return s;
}

template <class URBG>
ProtocolReport simulate_p3(const StateSpec& spec, int N, int r, const DecisionRule& rule,
                           int rounds, URBG& rng) {
  ProtocolReport out = run_p3(spec, N, r, rule, rounds);
  const auto s = sample_p3(spec, N, r, rounds, rng);
  out.statistic = s.odd_blocks;
  out.decision = rule.contains(s.odd_blocks) ? Decision::Above : Decision::Below;
  out.residual.reduced_fidelity = s.mean_fidelity;
  out.residual.certified_fidelity = s.certified_fidelity;
  out.ledger.copies_measured = s.measured;
  out.ledger.copies_retained = s.retained;
  return out;
}

// ---------------------------------------------------------------------------
// Block-size optimization.

struct WitnessObjective {
  Fidelity F0;
  int N = 0;
  double delta = 0.5;
  Family family = Family::Werner;
};

struct DiscriminateObjective {
  Fidelity F1;
  Fidelity F2;
  Family family = Family::Werner;
};

using BlockObjective = std::variant<WitnessObjective, DiscriminateObjective>;

inline double even_parity_gap(const DiscriminateObjective& o, int r) {
  const auto m = std::get<BlockParity>(model_for(ProtocolId::P3, o.family, r));
  return m.even_probability(o.F1.value()) - m.even_probability(o.F2.value());
}

// Integral over F in [0, 1] of the P3 witnessing success probability.
inline double integrated_success(const WitnessObjective& o, int r) {
  const int n = p3_blocks(o.N, r);
  const auto rule = build_sigma(n, o.F0, o.delta, model_for(ProtocolId::P3, o.family, r));
  auto ps = [&](double F) {
    return success_probability_witness(Fidelity(std::clamp(F, 0.0, 1.0)), rule).value;
  };
  return detail::integrate_panels(ps, 0.0, o.F0.value(), 16) +
         detail::integrate_panels(ps, o.F0.value(), 1.0, 16);
}

// argmax over r in [r_lo, r_hi]; ties resolve to the smallest r.
inline int optimize_block_size(const BlockObjective& objective, int r_lo, int r_hi) {
  if (r_lo < 2 || r_hi < r_lo) throw std::invalid_argument("empty block-size range");
  int best = r_lo;
  double best_value = -std::numeric_limits<double>::infinity();
  for (int r = r_lo; r <= r_hi; ++r) {
    double v = 0.0;
    if (const auto* d = std::get_if<DiscriminateObjective>(&objective)) {
      v = even_parity_gap(*d, r);
    } else {
      const auto& w = std::get<WitnessObjective>(objective);
      if (r > w.N) break;
      v = integrated_success(w, r);
    }
    if (v > best_value) {
      best_value = v;
      best = r;
    }
  }
  return best;
}

// ---------------------------------------------------------------------------
// Discrimination.

struct DiscriminationReport {
  ProtocolId protocol = ProtocolId::P0;
  Family family = Family::Werner;
  int ensemble_size = 0;
  std::optional<int> block_size;
  DiscriminationRule rule;
  double success_probability = 0.0;
  bool efficient = true;
  std::optional<int> statistic;
  std::optional<Decision> decision;
  ResourceLedger ledger;
};

// Statistic model and number of observations behind a discrimination run.
// P2 only separates outcomes around a threshold and is not offered here.
inline DiscriminationReport run_discrimination(ProtocolId protocol, Family family, int n,
                                               Fidelity F1, Fidelity F2,
                                               std::optional<int> d = std::nullopt,
                                               std::optional<int> r = std::nullopt,
                                               double eta1 = 0.5) {
  DiscriminationReport rep;
  rep.protocol = protocol;
  rep.family = family;
  rep.ensemble_size = n;
  int observations = n;
  OutcomeModel model;
  switch (protocol) {
    case ProtocolId::P0:
      model = model_for(protocol, family);
      rep.ledger.copies_measured = n;
      break;
    case ProtocolId::P1: {
      model = model_for(protocol, family);
      const int dim = d.value_or(minimum_counter_dimension(family, n));
      check_counter_dimension(family, n, dim);
      rep.efficient = family == Family::AmplitudeDamping;
      rep.ledger.copies_retained = n;
      rep.ledger.ebits_consumed = std::log2(static_cast<double>(dim));
      break;
    }
    case ProtocolId::P2:
      throw UnsupportedCombination("p2 reads a threshold outcome and only solves witnessing");
    case ProtocolId::P3: {
      const int rr = r.value_or(2);
      observations = p3_blocks(n, rr);
      model = model_for(protocol, family, rr);
      rep.block_size = rr;
      rep.ledger.copies_measured = observations;
      rep.ledger.copies_retained = n - observations;
      break;
    }
  }
  rep.rule = discrimination_rule(observations, F1, F2, model);
  rep.success_probability = success_probability_discriminate(rep.rule, eta1, 1.0 - eta1);
  return rep;
}

// ---------------------------------------------------------------------------
// Uniform entry points used by the CLI and the sweeps.

struct WitnessSetup {
  ProtocolId protocol = ProtocolId::P0;
  Family family = Family::AmplitudeDamping;
  int n = 1;  // ensemble size (N for P3)
  Fidelity F0{0.95};
  double delta = 0.5;
  int d = 0;            // P1/P2 auxiliary dimension; 0 picks the minimum
  int m = 0;            // P2 register dimension
  int delta0 = 0;       // P2; 0 picks the group holding the mode at F0
  int r = 2;            // P3
  int rounds = 1;       // P3
  std::optional<DecisionRule> rule;  // filled by prepare_witness (not P2)
  std::optional<CoarseParams> coarse;
};

// Validates the setup against the family, fills defaults and builds Sigma.
inline WitnessSetup prepare_witness(WitnessSetup s) {
  if (s.n < 1) throw std::invalid_argument("ensemble size must be >= 1");
  switch (s.protocol) {
    case ProtocolId::P0:
      s.rule = build_sigma(s.n, s.F0, s.delta, model_for(s.protocol, s.family));
      break;
    case ProtocolId::P1: {
      const auto model = model_for(s.protocol, s.family);
      if (s.d == 0) s.d = minimum_counter_dimension(s.family, s.n);
      check_counter_dimension(s.family, s.n, s.d);
      s.rule = build_sigma(s.n, s.F0, s.delta, model);
      break;
    }
    case ProtocolId::P2: {
      model_for(s.protocol, s.family);
      if (s.d == 0) s.d = minimum_counter_dimension(s.family, s.n);
      check_counter_dimension(s.family, s.n, s.d);
      if (s.m == 0) throw std::invalid_argument("p2 needs the register dimension m");
      if (s.m < 1 || s.d % s.m != 0) {
        throw std::invalid_argument("m=" + std::to_string(s.m) + " must divide d=" +
                                    std::to_string(s.d));
      }
      if (s.delta0 == 0) s.delta0 = default_delta0(s.family, s.n, s.d, s.m, s.F0);
      s.coarse = CoarseParams(s.d, s.m, s.delta0);
      break;
    }
    case ProtocolId::P3: {
      if (s.rounds < 1) throw std::invalid_argument("rounds must be >= 1");
      const int blocks = p3_blocks(s.n, s.r);
      s.rule = build_sigma(blocks, s.F0, s.delta, model_for(s.protocol, s.family, s.r));
      break;
    }
  }
  return s;
}

inline void check_spec_family(const StateSpec& spec, const WitnessSetup& s) {
  if (spec.family() != s.family) {
    throw std::invalid_argument("state family does not match the prepared setup");
  }
}

inline ProtocolReport run_witness(const StateSpec& spec, const WitnessSetup& s) {
  check_spec_family(spec, s);
  switch (s.protocol) {
    case ProtocolId::P0: return run_p0(spec, s.n, *s.rule);
    case ProtocolId::P1: return run_p1(spec, s.n, s.d, *s.rule);
    case ProtocolId::P2: return run_p2(spec, s.n, *s.coarse, s.F0);
    case ProtocolId::P3: return run_p3(spec, s.n, s.r, *s.rule, s.rounds);
  }
  throw std::invalid_argument("unknown protocol");
}

template <class URBG>
ProtocolReport simulate_witness(const StateSpec& spec, const WitnessSetup& s, URBG& rng) {
  check_spec_family(spec, s);
  switch (s.protocol) {
    case ProtocolId::P0: return simulate_p0(spec, s.n, *s.rule, rng);
    case ProtocolId::P1: return simulate_p1(spec, s.n, s.d, *s.rule, rng);
    case ProtocolId::P2: return simulate_p2(spec, s.n, *s.coarse, s.F0, rng);
    case ProtocolId::P3: return simulate_p3(spec, s.n, s.r, *s.rule, s.rounds, rng);
  }
  throw std::invalid_argument("unknown protocol");
}

// Draws the protocol statistic only (the quantity the report's distribution
// describes).
template <class URBG>
int sample_statistic(const StateSpec& spec, const WitnessSetup& s, URBG& rng) {
  switch (s.protocol) {
    case ProtocolId::P0: return sample_p0(p0_labels(spec), s.n, rng);
    case ProtocolId::P1: return sample_counter(spec, s.n, s.d, rng).j;
    case ProtocolId::P2: return sample_p2(spec, s.n, *s.coarse, rng).outcome_m ? 1 : 0;
    case ProtocolId::P3: return sample_p3(spec, s.n, s.r, 1, rng).odd_blocks;
  }
  throw std::invalid_argument("unknown protocol");
}

inline Decision decide(const WitnessSetup& s, int statistic) {
  if (s.protocol == ProtocolId::P2) return statistic == 1 ? Decision::Above : Decision::Below;
  return s.rule->contains(statistic) ? Decision::Above : Decision::Below;
}

}  // namespace entwit
