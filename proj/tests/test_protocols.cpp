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

// Protocol-level tests: dense simulator invariants, analytic reports against
// sampling, ledgers, block-size optimization, figure schemas and the
// symbolic-vs-dense suite.

#include <cmath>
#include <set>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "entwit/entwit.hpp"

namespace entwit {
namespace {

namespace dn = dense;

// ---------------------------------------------------------------------------
// dense_oracle

TEST(Dense, SingleCopyMatrices) {
  const auto pure = dn::single_copy(make_state(Family::AmplitudeDamping, 1.0), "1").matrix();
  const dn::Vec phi = dn::bell_vector(BellIndex{});
  EXPECT_NEAR((pure - phi * phi.adjoint()).norm(), 0.0, 1e-14);
  const auto mixed = dn::single_copy(make_state(Family::Werner, 0.25), "1").matrix();
  EXPECT_NEAR((mixed - dn::Mat::Identity(4, 4) / 4.0).norm(), 0.0, 1e-14);
}

TEST(Dense, EnsembleInvariants) {
  const auto s = dn::build_ensemble(make_state(Family::AmplitudeDamping, 0.8), 2, 3);
  EXPECT_EQ(s.dimension(), 144u);
  EXPECT_NO_THROW(s.check_invariants());
  EXPECT_NEAR(s.trace(), 1.0, 1e-12);
  EXPECT_LT(s.purity(), 1.0);
  EXPECT_THROW(dn::build_ensemble(make_state(Family::Werner, 0.9), 9), DimensionCapExceeded);
}

TEST(Dense, EngShiftsAuxiliary) {
  // |01> control on |Phi_00^3> leaves the auxiliary in |Phi_01^3>.
  auto state = dn::tensor(
      dn::pure_state(dn::pair_subsystems("1"), dn::component_vector(Component::Ket01)),
      dn::pure_state({{3, dn::Party::A, "Aaux"}, {3, dn::Party::B, "Baux"}},
                     dn::max_entangled(3, 0, 0)));
  dn::EngGate eng;
  eng.controls.push_back({0, 1});
  eng.aux_a = 2;
  eng.aux_b = 3;
  dn::apply_gate(state, eng);
  const int keep[2] = {2, 3};
  EXPECT_NEAR(dn::fidelity(state, keep, dn::max_entangled(3, 0, 1)), 1.0, 1e-12);
}

TEST(Dense, TwirlsPreserveFidelity) {
  const dn::Mat ad = dn::single_copy(make_state(Family::AmplitudeDamping, 0.83), "").matrix();
  const dn::Vec phi = dn::bell_vector(BellIndex{});
  const dn::Mat bd = dn::twirl_bell_diagonal(ad);
  const dn::Mat w = dn::twirl_werner(ad);
  EXPECT_NEAR(dn::fidelity(bd, phi), 0.83, 1e-12);
  EXPECT_NEAR(dn::fidelity(w, phi), 0.83, 1e-12);
  const auto symbolic = bell_diagonal_weights(make_state(Family::AmplitudeDamping, 0.83));
  for (int k = 0; k < 4; ++k) {
    EXPECT_NEAR(dn::fidelity(bd, dn::bell_vector(BellIndex::from_flat(k))), symbolic[k], 1e-12);
  }
  EXPECT_NEAR((dn::twirl_werner(w) - w).norm(), 0.0, 1e-12);
}

TEST(Dense, CounterDistributionExample) {
  const auto c = oracle::dense_counter(make_state(Family::AmplitudeDamping, 0.8), 2, 3);
  ASSERT_EQ(c.probs.size(), 3u);
  EXPECT_NEAR(c.probs[0], 0.64, 1e-12);
  EXPECT_NEAR(c.probs[1], 0.32, 1e-12);
  EXPECT_NEAR(c.probs[2], 0.04, 1e-12);
}

TEST(Dense, CoarseReadoutOnZeroCounter) {
  const CoarseParams c(4, 2, 1);
  EXPECT_NEAR(oracle::dense_p2_measure_prob(make_state(Family::AmplitudeDamping, 1.0), 2, c),
              1.0, 1e-12);
}

TEST(Dense, RecurrenceMatchesSymbolic) {
  for (double F : {0.4, 0.7, 0.9}) {
    const auto w = bell_diagonal_weights(make_state(Family::Werner, F));
    const auto sym = recurrence_step(w);
    const auto den = oracle::dense_recurrence(w);
    EXPECT_NEAR(sym.success_probability, den.success_probability, 1e-12);
    for (int k = 0; k < 4; ++k) EXPECT_NEAR(sym.weights[k], den.weights[k], 1e-12);
  }
  EXPECT_GT(oracle::dense_recurrence(bell_diagonal_weights(make_state(Family::Werner, 0.7)))
                .weights[0],
            0.7);
}

// ---------------------------------------------------------------------------
// protocols

TEST(Protocols, P0AndP1AgreeForAmplitudeDamping) {
  for (int n : {5, 20, 40}) {
    const auto model0 = model_for(ProtocolId::P0, Family::AmplitudeDamping);
    const auto model1 = model_for(ProtocolId::P1, Family::AmplitudeDamping);
    const auto r0 = build_sigma(n, Fidelity(0.95), 0.5, model0);
    const auto r1 = build_sigma(n, Fidelity(0.95), 0.5, model1);
    for (double F = 0.8; F <= 1.0; F += 0.01) {
      const auto s = make_state(Family::AmplitudeDamping, F);
      const auto a = run_p0(s, n, r0);
      const auto b = run_p1(s, n, n + 1, r1);
      EXPECT_NEAR(a.success_probability, b.success_probability, 1e-12);
      for (int j = 0; j <= n; ++j) EXPECT_NEAR(a.distribution.prob(j), b.distribution.prob(j), 1e-12);
    }
  }
}

TEST(Protocols, P1ResidualIsCountingFraction) {
  const auto s = make_state(Family::AmplitudeDamping, 0.9);
  EXPECT_DOUBLE_EQ(residual_fidelity(s, 20, 0), 1.0);
  EXPECT_DOUBLE_EQ(residual_fidelity(s, 20, 2), 0.9);
  // The outcome-averaged residual equals the input fidelity.
  const auto rule = build_sigma(20, Fidelity(0.95), 0.5, model_for(ProtocolId::P1, s.family()));
  EXPECT_NEAR(*run_p1(s, 20, 21, rule).residual.reduced_fidelity, 0.9, 1e-12);
  const auto w = make_state(Family::Werner, 0.8);
  const auto wr = build_sigma(6, Fidelity(0.7), 0.5, model_for(ProtocolId::P1, w.family()));
  EXPECT_NEAR(*run_p1(w, 6, 13, wr).residual.reduced_fidelity, 0.8, 1e-12);
}

TEST(Protocols, CounterDimensionChecks) {
  const auto s = make_state(Family::Werner, 0.8);
  const auto rule = build_sigma(5, Fidelity(0.7), 0.5, model_for(ProtocolId::P1, s.family()));
  EXPECT_THROW(run_p1(s, 5, 6, rule), std::invalid_argument);
  EXPECT_NO_THROW(run_p1(s, 5, 11, rule));
  EXPECT_THROW(model_for(ProtocolId::P1, Family::Dephasing), UnsupportedCombination);
  EXPECT_THROW(model_for(ProtocolId::P2, Family::BellDiagonal), UnsupportedCombination);
}

TEST(Protocols, LedgerConservation) {
  const auto s = make_state(Family::Werner, 0.9);
  for (int r : {2, 3, 7}) {
    for (int rounds : {1, 2, 5}) {
      const int N = 50;
      const auto rule = build_sigma(p3_blocks(N, r), Fidelity(0.85), 0.5,
                                    model_for(ProtocolId::P3, s.family(), r));
      const auto rep = run_p3(s, N, r, rule, rounds);
      EXPECT_EQ(rep.ledger.copies_measured + rep.ledger.copies_retained, N);
      Rng rng = make_stream(5, r * 10 + rounds);
      for (int t = 0; t < 50; ++t) {
        const auto sample = sample_p3(s, N, r, rounds, rng);
        ASSERT_EQ(sample.measured + sample.retained, N);
        ASSERT_LE(sample.measured, rep.ledger.copies_measured);
      }
    }
  }
  const auto ad = make_state(Family::AmplitudeDamping, 0.95);
  const auto p2 = run_p2(ad, 47, CoarseParams(48, 12, 2), Fidelity(0.95));
  EXPECT_EQ(p2.ledger.copies_retained, 47);
  EXPECT_NEAR(p2.ledger.ebits_consumed, std::log2(12.0), 1e-15);
}

TEST(Protocols, BackActionValues) {
  EXPECT_NEAR(werner_back_action(0.7), 0.58, 1e-15);
  EXPECT_DOUBLE_EQ(werner_back_action(1.0), 1.0);
  EXPECT_DOUBLE_EQ(werner_back_action(0.25), 0.25);
  const auto m = std::get<BlockParity>(model_for(ProtocolId::P3, Family::Werner, 2));
  EXPECT_NEAR(m.even_probability(0.7), 0.68, 1e-15);
  // Dephasing has no back-action on the rotated copies.
  const auto dw = p3_weights(make_state(Family::Dephasing, 0.8));
  EXPECT_NEAR(back_action_fidelity(dw), 0.8, 1e-15);
}

TEST(Protocols, BackActionMatchesDenseTwoPair) {
  for (double F : {0.25, 0.5, 0.7, 0.9, 1.0}) {
    const auto dense = oracle::dense_p3(make_state(Family::Werner, F), 1, 2);
    EXPECT_NEAR(dense.control_fidelity, werner_back_action(F), 1e-9) << F;
  }
}

TEST(Protocols, BlockSizeOptimization) {
  EXPECT_EQ(optimize_block_size(DiscriminateObjective{Fidelity(0.99), Fidelity(0.95)}, 2, 100), 29);
  EXPECT_EQ(optimize_block_size(DiscriminateObjective{Fidelity(0.9), Fidelity(0.9)}, 2, 100), 2);
  // Independent grid search.
  auto pi0 = [](double F, int r) {
    const double a = 1.0 - (1.0 - F) * 2.0 / 3.0;
    return 0.5 * (1.0 + std::pow(2.0 * a - 1.0, r));
  };
  int best = 2;
  for (int r = 2; r <= 100; ++r) {
    if (pi0(0.98, r) - pi0(0.9, r) > pi0(0.98, best) - pi0(0.9, best)) best = r;
  }
  EXPECT_EQ(optimize_block_size(DiscriminateObjective{Fidelity(0.98), Fidelity(0.9)}, 2, 100), best);
}

TEST(Protocols, P2NoiselessAbove) {
  const auto rep = run_p2(make_state(Family::AmplitudeDamping, 1.0), 23, CoarseParams(24, 12, 3),
                          Fidelity(0.95));
  EXPECT_NEAR(rep.success_probability, 1.0, 1e-15);
  EXPECT_NEAR(*rep.residual.auxiliary_fidelity, 1.0, 1e-15);
}

TEST(Protocols, PrepareWitnessValidation) {
  WitnessSetup s;
  s.protocol = ProtocolId::P2;
  s.n = 47;
  s.d = 48;
  s.m = 10;
  EXPECT_THROW(prepare_witness(s), std::invalid_argument);
  s.m = 12;
  const auto ok = prepare_witness(s);
  ASSERT_TRUE(ok.coarse.has_value());
  EXPECT_GE(ok.coarse->delta0, 1);
  s.protocol = ProtocolId::P3;
  s.r = 1;
  EXPECT_THROW(prepare_witness(s), std::invalid_argument);
}

// Sampled statistics reproduce the analytic distributions.
TEST(Protocols, MonteCarloMatchesAnalytic) {
  struct Case {
    ProtocolId protocol;
    Family family;
    int n;
    int d;
    int m;
    int r;
    double F;
  };
  const std::vector<Case> cases{
      {ProtocolId::P0, Family::AmplitudeDamping, 20, 0, 0, 2, 0.92},
      {ProtocolId::P0, Family::Dephasing, 15, 0, 0, 2, 0.9},
      {ProtocolId::P1, Family::AmplitudeDamping, 20, 0, 0, 2, 0.9},
      {ProtocolId::P1, Family::Werner, 8, 0, 0, 2, 0.8},
      {ProtocolId::P2, Family::AmplitudeDamping, 23, 24, 12, 2, 0.93},
      {ProtocolId::P3, Family::Werner, 40, 0, 0, 4, 0.9},
      {ProtocolId::P3, Family::Dephasing, 30, 0, 0, 3, 0.85},
  };
  const long long trials = 40000;
  for (const auto& c : cases) {
    WitnessSetup s;
    s.protocol = c.protocol;
    s.family = c.family;
    s.n = c.n;
    s.d = c.d;
    s.m = c.m;
    s.r = c.r;
    s.F0 = Fidelity(0.9);
    s = prepare_witness(s);
    const auto spec = make_state(c.family, c.F);
    const auto rep = run_witness(spec, s);
    const auto& dist = rep.distribution;
    const auto hist = monte_carlo_histogram(trials, 99, dist.lo, dist.hi(), [&](Rng& rng) {
      return sample_statistic(spec, s, rng);
    });
    int within = 0;
    for (int j = dist.lo; j <= dist.hi(); ++j) {
      const double p = dist.prob(j);
      const double freq = static_cast<double>(hist[static_cast<std::size_t>(j - dist.lo)]) / trials;
      const double se = std::sqrt(std::max(p * (1.0 - p), 1e-12) / trials);
      within += std::abs(freq - p) <= 4.0 * se + 1e-12;
    }
    EXPECT_GE(within, static_cast<int>(0.95 * static_cast<double>(dist.size())))
        << protocol_name(c.protocol) << " " << family_name(c.family);
  }
}

TEST(Sampling, ResultsIndependentOfWorkerCount) {
  auto draw = [](Rng& rng) { return static_cast<int>(rng() % 1000); };
  const auto one = run_trials<int>(10000, 42, draw, 1);
  const auto four = run_trials<int>(10000, 42, draw, 4);
  EXPECT_EQ(one, four);
  const auto h1 = monte_carlo_histogram(9000, 3, 0, 999, draw, 1);
  const auto h3 = monte_carlo_histogram(9000, 3, 0, 999, draw, 3);
  EXPECT_EQ(h1, h3);
  EXPECT_NE(point_seed(1, 0), point_seed(1, 1));
}

TEST(Sampling, ParallelMapPropagatesErrors) {
  EXPECT_THROW(parallel_map<int>(
                   8, [](std::size_t i) -> int {
                     if (i == 5) throw std::runtime_error("boom");
                     return static_cast<int>(i);
                   },
                   3),
               std::runtime_error);
}

TEST(Discrimination, P1IsUnsupportedForDephasingAndP2Rejected) {
  EXPECT_THROW(run_discrimination(ProtocolId::P1, Family::Dephasing, 10, Fidelity(0.9),
                                  Fidelity(0.8)),
               UnsupportedCombination);
  EXPECT_THROW(run_discrimination(ProtocolId::P2, Family::AmplitudeDamping, 10, Fidelity(0.9),
                                  Fidelity(0.8)),
               UnsupportedCombination);
  const auto rep =
      run_discrimination(ProtocolId::P3, Family::Werner, 580, Fidelity(0.99), Fidelity(0.95), {}, 29);
  EXPECT_EQ(rep.rule.n, 20);
  EXPECT_GT(rep.success_probability, 0.5);
}

// ---------------------------------------------------------------------------
// figures and comparison

TEST(Figures, Fig4Schema) {
  const auto files = make_figure("fig4");
  ASSERT_EQ(files.size(), 2u);
  EXPECT_EQ(files[0].first, "fig4_d24.csv");
  EXPECT_EQ(files[0].second.header(), (std::vector<std::string>{"j", "Pr_M", "lambda_set"}));
  EXPECT_EQ(files[1].second.size(), 48u);
  EXPECT_THROW(make_figure("fig9"), std::invalid_argument);
}

TEST(Figures, Fig3aHasThreeCurves) {
  const auto files = make_figure("fig3a");
  ASSERT_EQ(files.size(), 3u);
  for (const auto& [name, t] : files) {
    EXPECT_NO_THROW(t.validate());
    const auto p0 = t.column("P_s_p0");
    const auto p1 = t.column("P_s_p1");
    for (const auto& row : t.rows()) EXPECT_EQ(row[p0], row[p1]) << name;
  }
}

TEST(Comparison, Fig8Resources) {
  const auto rows = compare_protocols({});
  std::set<double> grid;
  for (const auto& r : rows) {
    grid.insert(r.F);
    if (r.protocol == ProtocolId::P0) EXPECT_EQ(r.ledger.total(), 150);
    if (r.protocol == ProtocolId::P3) EXPECT_EQ(r.ledger.copies_measured, 67);
    if (r.protocol == ProtocolId::P1 && r.F >= 0.9) EXPECT_LT(r.ledger.total(), 20) << r.F;
  }
  EXPECT_EQ(grid.size(), 41u);
  EXPECT_NO_THROW(comparison_table(rows).validate());
}

// ---------------------------------------------------------------------------
// oracle suite

TEST(Oracle, SuitePasses) {
  const auto results = oracle::run_oracle_suite();
  ASSERT_FALSE(results.empty());
  for (const auto& r : results) EXPECT_TRUE(r.passed()) << r.name << " " << r.mismatch;
}

TEST(Oracle, CorruptedGroupingIsCaught) {
  oracle::OracleOptions opt;
  opt.symbolic_grouping = Grouping::Interleaved;
  const auto results = oracle::run_oracle_suite(opt);
  bool failed = false;
  for (const auto& r : results) failed |= !r.passed();
  EXPECT_TRUE(failed);
}

TEST(Oracle, CapsEnforced) {
  oracle::OracleOptions opt;
  opt.max_n = 5;
  EXPECT_THROW(oracle::run_oracle_suite(opt), DimensionCapExceeded);
  opt.max_n = 2;
  opt.max_d = 9;
  EXPECT_THROW(oracle::run_oracle_suite(opt), DimensionCapExceeded);
}

}  // namespace
}  // namespace entwit
