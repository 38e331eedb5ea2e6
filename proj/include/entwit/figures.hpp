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

// Data behind the figure set, one CSV table per curve. Everything here is
// analytic and deterministic.
//
// Schemas:
//   fig3a_delta<d>.csv, fig3b_n<n>.csv   F,P_s_p0,P_s_p1
//   fig4_d<d>.csv                         j,Pr_M,lambda_set
//   fig5a_d<d>.csv, fig5b_delta0_<k>.csv,
//   fig5c_m<m>.csv                        F,P_s
//   fig5d_delta0_<k>.csv                  F,aux_fidelity
//   fig7a.csv                             copies,P_s_p0,P_s_p3
//   fig7b.csv                             F,P_s_p0,P_s_p3,F_prime,shadow
//   fig7c.csv                             r,pi0_gap
//   fig7d.csv                             F,F_prime
//   fig8.csv                              see comparison_table

#include <cmath>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "entwit/comparison.hpp"
#include "entwit/csv.hpp"
#include "entwit/decision_stats.hpp"
#include "entwit/gate_engine.hpp"
#include "entwit/protocols.hpp"
#include "entwit/sampling.hpp"

namespace entwit {

using FigureFiles = std::vector<std::pair<std::string, CsvTable>>;

inline std::vector<double> linear_grid(double lo, double hi, int steps) {
  if (steps < 1) throw std::invalid_argument("grid needs at least one point");
  if (steps == 1) return {lo};
  std::vector<double> g;
  for (int i = 0; i < steps; ++i) g.push_back(lo + (hi - lo) * i / (steps - 1));
  g.back() = hi;
  return g;
}

// Threshold used for the P0/P1 and P2 witnessing panels.
inline constexpr double kFigureThreshold = 0.95;

namespace detail {

inline CsvTable p0_p1_curve(int n, double delta, const std::vector<double>& grid) {
  const Fidelity F0(kFigureThreshold);
  const auto r0 = build_sigma(n, F0, delta, model_for(ProtocolId::P0, Family::AmplitudeDamping));
  const auto r1 = build_sigma(n, F0, delta, model_for(ProtocolId::P1, Family::AmplitudeDamping));
  CsvTable t({"F", "P_s_p0", "P_s_p1"});
  for (double F : grid) {
    const auto s = make_state(Family::AmplitudeDamping, F);
    t.add(F, run_p0(s, n, r0).success_probability, run_p1(s, n, n + 1, r1).success_probability);
  }
  return t;
}

inline CsvTable p2_curve(int n, const CoarseParams& c, const std::vector<double>& grid) {
  CsvTable t({"F", "P_s"});
  for (double F : grid) {
    t.add(F, run_p2(make_state(Family::AmplitudeDamping, F), n, c, Fidelity(kFigureThreshold))
                 .success_probability);
  }
  return t;
}

// delta0 minimizing the jump |2 Pr(M | F0) - 1| of P_s at the threshold.
inline int smoothest_delta0(int n, int d, int m) {
  const auto dist = outcome_distribution(model_for(ProtocolId::P2, Family::AmplitudeDamping), n,
                                         Fidelity(kFigureThreshold));
  int best = 1;
  double best_jump = 2.0;
  for (int k = 1; k <= m; ++k) {
    const double jump = std::abs(2.0 * p2_measure_prob(dist, CoarseParams(d, m, k)) - 1.0);
    if (jump < best_jump - 1e-15) {
      best_jump = jump;
      best = k;
    }
  }
  return best;
}

}  // namespace detail

inline FigureFiles figure_fig3a() {
  FigureFiles out;
  const auto grid = linear_grid(0.7, 1.0, 121);
  for (const auto& [tag, delta] : {std::pair{"0.3", 0.3}, {"0.5", 0.5}, {"0.7", 0.7}}) {
    out.emplace_back(std::string("fig3a_delta") + tag + ".csv", detail::p0_p1_curve(20, delta, grid));
  }
  return out;
}

inline FigureFiles figure_fig3b() {
  FigureFiles out;
  const auto grid = linear_grid(0.7, 1.0, 121);
  for (int n : {10, 20, 50, 100}) {
    out.emplace_back("fig3b_n" + std::to_string(n) + ".csv", detail::p0_p1_curve(n, 0.5, grid));
  }
  return out;
}

inline FigureFiles figure_fig4() {
  FigureFiles out;
  for (int d : {24, 48}) {
    const CoarseParams c(d, 12, 6);
    CsvTable t({"j", "Pr_M", "lambda_set"});
    for (int j = 0; j < d; ++j) {
      t.add(j, coarse_measure_prob(j, c), static_cast<int>(lambda_set(j, c)));
    }
    out.emplace_back("fig4_d" + std::to_string(d) + ".csv", std::move(t));
  }
  return out;
}

inline FigureFiles figure_fig5() {
  FigureFiles out;
  const auto grid = linear_grid(0.8, 1.0, 101);
  const Fidelity F0(kFigureThreshold);
  for (int d : {24, 48, 96}) {
    const int n = d - 1;
    const CoarseParams c(d, 12, default_delta0(Family::AmplitudeDamping, n, d, 12, F0));
    out.emplace_back("fig5a_d" + std::to_string(d) + ".csv", detail::p2_curve(n, c, grid));
  }
  for (int k : {4, 3, 2, 1}) {
    out.emplace_back("fig5b_delta0_" + std::to_string(k) + ".csv",
                     detail::p2_curve(47, CoarseParams(48, 12, k), grid));
  }
  for (int m : {4, 6, 12, 24}) {
    const CoarseParams c(48, m, detail::smoothest_delta0(47, 48, m));
    out.emplace_back("fig5c_m" + std::to_string(m) + ".csv", detail::p2_curve(47, c, grid));
  }
  for (int k : {1, 2, 3, 4}) {
    const CoarseParams c(48, 12, k);
    CsvTable t({"F", "aux_fidelity"});
    for (double F : grid) {
      t.add(F, *run_p2(make_state(Family::AmplitudeDamping, F), 47, c, F0)
                    .residual.auxiliary_fidelity);
    }
    out.emplace_back("fig5d_delta0_" + std::to_string(k) + ".csv", std::move(t));
  }
  return out;
}

inline FigureFiles figure_fig7() {
  FigureFiles out;
  const Fidelity F1(0.99);
  const Fidelity F2(0.95);
  const int r_star = optimize_block_size(DiscriminateObjective{F1, F2, Family::Werner}, 2, 100);
  {
    CsvTable t({"copies", "P_s_p0", "P_s_p3"});
    for (int c = 1; c <= 100; ++c) {
      const auto p0 = run_discrimination(ProtocolId::P0, Family::Werner, c, F1, F2);
      const auto p3 =
          run_discrimination(ProtocolId::P3, Family::Werner, c * r_star, F1, F2, {}, r_star);
      t.add(c, p0.success_probability, p3.success_probability);
    }
    out.emplace_back("fig7a.csv", std::move(t));
  }
  {
    // Witnessing at F0 = 0.97 with 600 copies; P3 picks its block size, P0
    // measures as many copies as P3 does.
    const Fidelity F0(0.97);
    const int N = 600;
    const int r = optimize_block_size(WitnessObjective{F0, N, 0.5, Family::Werner}, 2, 30);
    const int measured = p3_blocks(N, r);
    const auto rule0 = build_sigma(measured, F0, 0.5, model_for(ProtocolId::P0, Family::Werner));
    const auto rule3 = build_sigma(measured, F0, 0.5, model_for(ProtocolId::P3, Family::Werner, r));
    CsvTable t({"F", "P_s_p0", "P_s_p3", "F_prime", "shadow"});
    for (double F : linear_grid(0.9, 1.0, 101)) {
      const auto s = make_state(Family::Werner, F);
      const double fp = werner_back_action(F);
      t.add(F, run_p0(s, measured, rule0).success_probability,
            run_p3(s, N, r, rule3).success_probability, fp, F > F0.value() && fp < F0.value());
    }
    out.emplace_back("fig7b.csv", std::move(t));
  }
  {
    CsvTable t({"r", "pi0_gap"});
    for (int r = 2; r <= 100; ++r) {
      t.add(r, even_parity_gap(DiscriminateObjective{F1, F2, Family::Werner}, r));
    }
    out.emplace_back("fig7c.csv", std::move(t));
  }
  {
    CsvTable t({"F", "F_prime"});
    for (double F : linear_grid(0.0, 1.0, 101)) t.add(F, werner_back_action(F));
    out.emplace_back("fig7d.csv", std::move(t));
  }
  return out;
}

inline FigureFiles figure_fig8(const ComparisonConfig& cfg = {}) {
  return {{"fig8.csv", comparison_table(compare_protocols(cfg))}};
}

inline const std::vector<std::string_view>& figure_ids() {
  static const std::vector<std::string_view> ids{"fig3a", "fig3b", "fig4", "fig5", "fig7", "fig8"};
  return ids;
}

inline FigureFiles make_figure(std::string_view id) {
  if (id == "fig3a") return figure_fig3a();
  if (id == "fig3b") return figure_fig3b();
  if (id == "fig4") return figure_fig4();
  if (id == "fig5") return figure_fig5();
  if (id == "fig7") return figure_fig7();
  if (id == "fig8") return figure_fig8();
  throw std::invalid_argument("unknown figure id '" + std::string(id) + "'");
}

}  // namespace entwit
