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

// JSON forms of states, distributions, rules and reports.

#include <cmath>
#include <string>

#include <json.hpp>

#include "entwit/comparison.hpp"
#include "entwit/decision_stats.hpp"
#include "entwit/protocols.hpp"
#include "entwit/state_model.hpp"

namespace entwit {

using nlohmann::json;

// {"family": "werner", "F": 0.9} or
// {"family": "bell_diagonal", "weights": [p00, p01, p10, p11]}.
inline StateSpec state_from_json(const json& j) {
  const Family family = parse_family(j.at("family").get<std::string>());
  if (family == Family::BellDiagonal) {
    const auto w = j.at("weights").get<std::vector<double>>();
    if (w.size() != 4) throw std::invalid_argument("bell_diagonal needs four weights");
    return make_bell_diagonal({w[0], w[1], w[2], w[3]});
  }
  return make_state(family, Fidelity(j.at("F").get<double>()));
}

inline json to_json(const StateSpec& s) {
  json j{{"family", family_name(s.family())}, {"F", s.fidelity().value()}};
  if (s.family() == Family::BellDiagonal) {
    const auto w = s.bell_weights();
    j["weights"] = {w[0], w[1], w[2], w[3]};
  }
  return j;
}

// Probabilities rather than logs; exp of -inf is written as 0.
inline json to_json(const OutcomeDistribution& d) {
  return json{{"support", {d.lo, d.hi()}}, {"probs", d.probs()}};
}

inline OutcomeDistribution distribution_from_json(const json& j) {
  OutcomeDistribution d;
  d.lo = j.at("support").at(0).get<int>();
  const int hi = j.at("support").at(1).get<int>();
  for (double p : j.at("probs").get<std::vector<double>>()) {
    d.log_probs.push_back(p > 0.0 ? std::log(p) : kNegInf);
  }
  if (d.hi() != hi) throw std::invalid_argument("support does not match probability count");
  return d;
}

inline json to_json(const ResourceLedger& l) {
  json j{{"copies_measured", l.copies_measured},
         {"copies_retained", l.copies_retained},
         {"ebits_consumed", l.ebits_consumed}};
  if (l.feasible()) {
    j["copies_equiv"] = l.copies_equiv;
    j["total_resources"] = l.total();
  } else {
    j["copies_equiv"] = nullptr;
    j["total_resources"] = nullptr;
  }
  return j;
}

inline json to_json(const DecisionRule& r) {
  json j{{"model", model_name(r.model)}, {"n", r.n}, {"F0", r.F0.value()},
         {"sigma", r.members()}};
  if (r.delta) j["delta"] = *r.delta;
  return j;
}

template <class T>
json optional_json(const std::optional<T>& x) {
  return x ? json(*x) : json(nullptr);
}

inline json to_json(const ResidualEnsemble& r) {
  return json{{"kind", residual_kind_name(r.kind)},
              {"reduced_fidelity", optional_json(r.reduced_fidelity)},
              {"certified_fidelity", optional_json(r.certified_fidelity)},
              {"auxiliary_fidelity", optional_json(r.auxiliary_fidelity)}};
}

inline json to_json(const ProtocolReport& r) {
  json j{{"protocol", protocol_name(r.protocol)},
         {"state", to_json(r.spec)},
         {"ensemble_size", r.ensemble_size},
         {"F0", r.F0.value()},
         {"distribution", to_json(r.distribution)},
         {"success_probability", r.success_probability},
         {"at_boundary", r.at_boundary},
         {"efficient", r.efficient},
         {"statistic", optional_json(r.statistic)},
         {"decision", r.decision ? json(decision_name(*r.decision)) : json(nullptr)},
         {"residual", to_json(r.residual)},
         {"ledger", to_json(r.ledger)}};
  return j;
}

inline json to_json(const DiscriminationReport& r) {
  std::vector<int> first;
  for (std::size_t i = 0; i < r.rule.sigma1.size(); ++i) {
    if (r.rule.sigma1[i]) first.push_back(r.rule.lo + static_cast<int>(i));
  }
  return json{{"protocol", protocol_name(r.protocol)},
              {"family", family_name(r.family)},
              {"ensemble_size", r.ensemble_size},
              {"block_size", optional_json(r.block_size)},
              {"F1", r.rule.F1.value()},
              {"F2", r.rule.F2.value()},
              {"model", model_name(r.rule.model)},
              {"observations", r.rule.n},
              {"sigma1", first},
              {"success_probability", r.success_probability},
              {"efficient", r.efficient},
              {"statistic", optional_json(r.statistic)},
              {"decision", r.decision ? json(decision_name(*r.decision)) : json(nullptr)},
              {"ledger", to_json(r.ledger)}};
}

}  // namespace entwit
