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

// Resource comparison of the four protocols for witnessing on amplitude-damped
// ensembles: success probability against P0 as reference and the total
// number of consumed copies once auxiliary ebits are converted via the yield.

#include <cmath>
#include <string>
#include <vector>

#include "entwit/csv.hpp"
#include "entwit/decision_stats.hpp"
#include "entwit/gate_engine.hpp"
#include "entwit/protocols.hpp"
#include "entwit/resource_model.hpp"
#include "entwit/sampling.hpp"

namespace entwit {

struct ComparisonConfig {
  Family family = Family::AmplitudeDamping;
  Fidelity F0{0.95};
  double delta = 0.5;
  int p0_n = 150;
  int p1_n = 150;
  int p1_d = 151;
  int p2_n = 290;
  CoarseParams p2_coarse{300, 30, 2};
  int p3_N = 603;
  int p3_r = 9;
  std::vector<double> F_grid;  // empty: 0.80 to 1.00 in steps of 0.005

  std::vector<double> grid() const {
    if (!F_grid.empty()) return F_grid;
    std::vector<double> g;
    for (int i = 0; i <= 40; ++i) g.push_back(0.80 + 0.005 * i);
    g.back() = 1.0;
    return g;
  }
};

struct ComparisonRow {
  double F = 0.0;
  ProtocolId protocol = ProtocolId::P0;
  double success_probability = 0.0;
  double reference = 0.0;  // P0 success probability at the same F
  bool meets_reference = false;
  ResourceLedger ledger;
};

inline std::vector<ComparisonRow> compare_protocols(const ComparisonConfig& cfg) {
  const auto rule0 =
      build_sigma(cfg.p0_n, cfg.F0, cfg.delta, model_for(ProtocolId::P0, cfg.family));
  const auto rule1 =
      build_sigma(cfg.p1_n, cfg.F0, cfg.delta, model_for(ProtocolId::P1, cfg.family));
  const int blocks = p3_blocks(cfg.p3_N, cfg.p3_r);
  const auto rule3 = build_sigma(blocks, cfg.F0, cfg.delta,
                                 model_for(ProtocolId::P3, cfg.family, cfg.p3_r));
  const auto grid = cfg.grid();

  auto per_F = parallel_map<std::vector<ComparisonRow>>(grid.size(), [&](std::size_t i) {
    const double F = grid[i];
    const StateSpec spec = make_state(cfg.family, F);
    const double Y = F == 1.0 ? 1.0 : combined_yield(spec);
    std::vector<ProtocolReport> reps;
    reps.push_back(run_p0(spec, cfg.p0_n, rule0));
    reps.push_back(run_p1(spec, cfg.p1_n, cfg.p1_d, rule1));
    reps.push_back(run_p2(spec, cfg.p2_n, cfg.p2_coarse, cfg.F0));
    reps.push_back(run_p3(spec, cfg.p3_N, cfg.p3_r, rule3));
    const double ref = reps.front().success_probability;
    std::vector<ComparisonRow> rows;
    for (const auto& r : reps) {
      ComparisonRow row;
      row.F = F;
      row.protocol = r.protocol;
      row.success_probability = r.success_probability;
      row.reference = ref;
      row.meets_reference = r.success_probability >= ref - 1e-12;
      row.ledger = with_yield(r.ledger, Y);
      rows.push_back(row);
    }
    return rows;
  });

  std::vector<ComparisonRow> out;
  for (auto& rows : per_F) out.insert(out.end(), rows.begin(), rows.end());
  return out;
}

inline CsvTable comparison_table(const std::vector<ComparisonRow>& rows) {
  CsvTable t({"F", "protocol", "P_s", "copies_measured", "ebits", "copies_equiv", "R",
              "P_s_ref", "meets_ref"});
  for (const auto& r : rows) {
    const std::string R = r.ledger.feasible() ? std::to_string(r.ledger.total()) : "inf";
    const std::string equiv =
        r.ledger.feasible() ? std::to_string(r.ledger.copies_equiv) : "inf";
    t.add(r.F, protocol_name(r.protocol), r.success_probability, r.ledger.copies_measured,
          r.ledger.ebits_consumed, equiv, R, r.reference, r.meets_reference);
  }
  return t;
}

}  // namespace entwit
