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

// Cross-check of the index-level engine and closed-form statistics against
// the dense simulator on small instances. Every check reports the largest
// absolute mismatch it saw.

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "entwit/csv.hpp"
#include "entwit/decision_stats.hpp"
#include "entwit/dense_oracle.hpp"
#include "entwit/gate_engine.hpp"
#include "entwit/protocols.hpp"
#include "entwit/resource_model.hpp"
#include "entwit/state_model.hpp"

namespace entwit::oracle {

inline constexpr double kOracleTolerance = 1e-9;

struct CheckResult {
  std::string name;
  double mismatch = 0.0;
  double tolerance = kOracleTolerance;
  bool passed() const { return mismatch < tolerance; }
};

struct OracleOptions {
  int max_n = 4;
  int max_d = 8;
  // Grouping the symbolic side assumes for P2; the dense side always uses the
  // ceiling map. Anything else must be caught as a mismatch.
  Grouping symbolic_grouping = Grouping::Ceiling;
};

inline double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) return std::numeric_limits<double>::infinity();
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

// ---------------------------------------------------------------------------
// Symbolic side by brute-force enumeration of label configurations.

// Distribution of the register value j in Z_d.
inline std::vector<double> enumerate_counter(const StateSpec& spec, int n, int d) {
  const auto labels = error_label_distribution(spec);
  std::vector<double> out(static_cast<std::size_t>(d), 0.0);
  std::vector<int> idx(static_cast<std::size_t>(n), 0);
  while (true) {
    ErrorConfig config;
    double p = 1.0;
    for (int i : idx) {
      config.labels.push_back(static_cast<ErrorLabel>(i));
      p *= labels.probs[static_cast<std::size_t>(i)];
    }
    if (p > 0.0) out[static_cast<std::size_t>(apply_eng(config, d).value)] += p;
    int k = n - 1;
    while (k >= 0 && ++idx[static_cast<std::size_t>(k)] == kNumLabels) idx[static_cast<std::size_t>(k--)] = 0;
    if (k < 0) break;
  }
  return out;
}

// Closed-form counter distribution folded into Z_d.
inline std::vector<double> model_counter(const StateSpec& spec, int n, int d) {
  const auto dist =
      outcome_distribution(model_for(ProtocolId::P1, spec.family()), n, spec.fidelity());
  std::vector<double> out(static_cast<std::size_t>(d), 0.0);
  for (int j = dist.lo; j <= dist.hi(); ++j) out[static_cast<std::size_t>(mod(j, d))] += dist.prob(j);
  return out;
}

// ---------------------------------------------------------------------------
// Dense side.

namespace dn = entwit::dense;

inline dn::Mat bell_projector_sum(std::initializer_list<BellIndex> which) {
  dn::Mat p = dn::Mat::Zero(4, 4);
  for (auto b : which) {
    const dn::Vec v = dn::bell_vector(b);
    p += v * v.adjoint();
  }
  return p;
}

// Single-copy pass element: Z(x)Z parity for amplitude damping, otherwise the
// average of the +1 eigenspaces of XX, -YY and ZZ, i.e. Psi00 plus a third of
// every other Bell state.
inline dn::Mat p0_pass_element(Family family) {
  if (family == Family::AmplitudeDamping) {
    return bell_projector_sum({BellIndex{0, 0}, BellIndex{1, 0}});
  }
  const dn::Mat zz = dn::kron(dn::pauli(3), dn::pauli(3));
  const dn::Mat xx = dn::kron(dn::pauli(1), dn::pauli(1));
  const dn::Mat yy = dn::kron(dn::pauli(2), dn::pauli(2));
  const dn::Mat id = dn::Mat::Identity(4, 4);
  return ((id + xx) / 2.0 + (id - yy) / 2.0 + (id + zz) / 2.0) / 3.0;
}

// Failure-count distribution of P0 from sequential single-copy POVMs.
inline std::vector<double> dense_p0(const StateSpec& spec, int n) {
  const auto state = dn::build_ensemble(spec, n);
  const dn::Mat pass = p0_pass_element(spec.family());
  const std::vector<dn::Mat> povm{pass, dn::Mat::Identity(4, 4) - pass};
  std::vector<double> out(static_cast<std::size_t>(n + 1), 0.0);
  std::function<void(const dn::DenseState&, int, int, double)> rec =
      [&](const dn::DenseState& s, int copy, int fails, double p) {
        if (copy == n) {
          out[static_cast<std::size_t>(fails)] += p;
          return;
        }
        const int t[2] = {2 * copy, 2 * copy + 1};
        const auto m = dn::measure(s, t, povm);
        for (int k = 0; k < 2; ++k) {
          if (m.probs[static_cast<std::size_t>(k)] > 0.0) {
            rec(m.post[static_cast<std::size_t>(k)], copy + 1, fails + k,
                p * m.probs[static_cast<std::size_t>(k)]);
          }
        }
      };
  rec(state, 0, 0, 1.0);
  return out;
}

struct DenseCounter {
  std::vector<double> probs;             // register value j in Z_d
  std::vector<double> copy_fidelity;     // fidelity of copy 1 given j
};

inline DenseCounter dense_counter(const StateSpec& spec, int n, int d) {
  auto state = dn::build_ensemble(spec, n, d);
  dn::EngGate eng;
  for (int i = 0; i < n; ++i) eng.controls.push_back({2 * i, 2 * i + 1});
  eng.aux_a = state.index_of("Aaux");
  eng.aux_b = state.index_of("Baux");
  dn::apply_gate(state, eng);
  const int t[2] = {eng.aux_a, eng.aux_b};
  const auto m = dn::measure_projective(state, t, d, [d](std::span<const int> x) {
    return mod(x[0] - x[1], d);
  });
  DenseCounter out;
  const int keep[2] = {0, 1};
  const dn::Vec ref = dn::bell_vector(BellIndex{});
  for (int j = 0; j < d; ++j) {
    out.probs.push_back(m.probs[static_cast<std::size_t>(j)]);
    out.copy_fidelity.push_back(m.probs[static_cast<std::size_t>(j)] > 0.0
                                    ? dn::fidelity(m.post[static_cast<std::size_t>(j)], keep, ref)
                                    : 0.0);
  }
  return out;
}

// P2 readout: ENG, bilateral coarse graining into the register pair
// (Areg, Breg), Areg handed to B, then the M projector on (Breg, Areg).
inline double dense_p2_measure_prob(const StateSpec& spec, int n, const CoarseParams& c) {
  auto state = dn::build_ensemble(spec, n, c.d);
  dn::Vec zero = dn::Vec::Zero(static_cast<Eigen::Index>(c.m) * c.m);
  zero(0) = 1.0;
  state = dn::tensor(state,
                     dn::pure_state({{c.m, dn::Party::A, "Areg"}, {c.m, dn::Party::B, "Breg"}}, zero));
  dn::EngGate eng;
  for (int i = 0; i < n; ++i) eng.controls.push_back({2 * i, 2 * i + 1});
  eng.aux_a = state.index_of("Aaux");
  eng.aux_b = state.index_of("Baux");
  dn::apply_gate(state, eng);
  dn::CoarseGate cg;
  cg.src_a = eng.aux_a;
  cg.src_b = eng.aux_b;
  cg.dst_a = state.index_of("Areg");
  cg.dst_b = state.index_of("Breg");
  cg.params = c;
  dn::apply_gate(state, cg);
  auto& a2 = state.subsystems()[static_cast<std::size_t>(cg.dst_a)];
  a2.party = dn::Party::B;
  a2.name = "Breg_teleported";
  const int t[2] = {cg.dst_b, cg.dst_a};
  const auto m = dn::measure_projective(state, t, 2, [&](std::span<const int> x) {
    return mod(x[1] - x[0], c.m) < c.delta0 ? 1 : 0;
  });
  return m.probs[1];
}

// Full P2 pipeline on a definite auxiliary |Phi_{0j}>: coarse graining,
// outcome M, undo of the B-side map, Fourier readout of the teleported
// register and the conditional phase. Returns the expected fidelity of the
// recovered auxiliary with |Phi_{0j}>.
inline double dense_p2_recovery(int j, const CoarseParams& c) {
  dn::Vec zero = dn::Vec::Zero(static_cast<Eigen::Index>(c.m) * c.m);
  zero(0) = 1.0;
  auto state = dn::tensor(
      dn::pure_state({{c.d, dn::Party::A, "Aaux"}, {c.d, dn::Party::B, "Baux"}},
                     dn::max_entangled(c.d, 0, j)),
      dn::pure_state({{c.m, dn::Party::A, "Areg"}, {c.m, dn::Party::B, "Breg"}}, zero));
  dn::CoarseGate cg{0, 2, 1, 3, c, false, false};
  dn::apply_gate(state, cg);
  state.subsystems()[2].party = dn::Party::B;
  const int mt[2] = {3, 2};
  const auto m = dn::measure_projective(state, mt, 2, [&](std::span<const int> x) {
    return mod(x[1] - x[0], c.m) < c.delta0 ? 1 : 0;
  });
  const dn::Vec ref = dn::max_entangled(c.d, 0, j);
  const dn::Mat fourier = dn::fourier_basis(c.m);
  std::vector<dn::Mat> povm;
  for (int l = 0; l < c.m; ++l) povm.push_back(fourier.col(l) * fourier.col(l).adjoint());
  double expected = 0.0;
  for (int outcome = 0; outcome < 2; ++outcome) {
    const double pm = m.probs[static_cast<std::size_t>(outcome)];
    if (pm <= 0.0) continue;
    auto branch = m.post[static_cast<std::size_t>(outcome)];
    dn::apply_gate(branch, dn::CoarseGate{0, 2, 1, 3, c, true, true});
    const int ft[1] = {2};
    const auto f = dn::measure(branch, ft, povm);
    for (int l = 0; l < c.m; ++l) {
      const double pl = f.probs[static_cast<std::size_t>(l)];
      if (pl <= 0.0) continue;
      auto fixed = f.post[static_cast<std::size_t>(l)];
      dn::apply_gate(fixed, dn::PhaseCorrection{0, c, l});
      const int keep[2] = {0, 1};
      expected += pm * pl * dn::fidelity(fixed, keep, ref);
    }
  }
  return expected;
}

// One copy as it enters P3: Werner-twirled, or H(x)H-rotated if dephased.
inline dn::Mat p3_single_copy(const StateSpec& spec) {
  const dn::Mat rho = dn::single_copy(spec, "").matrix();
  if (spec.family() == Family::Dephasing) {
    dn::Mat h(2, 2);
    h << 1, 1, 1, -1;
    h /= std::sqrt(2.0);
    const dn::Mat hh = dn::kron(h, h);
    return hh * rho * hh.adjoint();
  }
  return dn::twirl_werner(rho);
}

struct DenseBlocks {
  std::vector<double> odd;      // distribution of the odd-block count
  double control_fidelity = 0;  // outcome-averaged mean control fidelity
};

inline DenseBlocks dense_p3(const StateSpec& spec, int blocks, int r) {
  const dn::Mat rho = p3_single_copy(spec);
  const int N = blocks * r;
  dn::DenseState state = dn::from_matrix(rho, dn::pair_subsystems("1"));
  for (int i = 2; i <= N; ++i) {
    state = dn::tensor(state, dn::from_matrix(rho, dn::pair_subsystems(std::to_string(i))));
  }
  for (int b = 0; b < blocks; ++b) {
    const int tgt = b * r + r - 1;
    for (int c = b * r; c < tgt; ++c) {
      dn::apply_gate(state, dn::BcnotGate{2 * c, 2 * c + 1, 2 * tgt, 2 * tgt + 1});
    }
  }
  DenseBlocks out;
  out.odd.assign(static_cast<std::size_t>(blocks + 1), 0.0);
  const dn::Vec ref = dn::bell_vector(BellIndex{});
  std::function<void(const dn::DenseState&, int, int, double)> rec =
      [&](const dn::DenseState& s, int b, int odd, double p) {
        if (b == blocks) {
          out.odd[static_cast<std::size_t>(odd)] += p;
          double f = 0.0;
          int count = 0;
          for (int blk = 0; blk < blocks; ++blk) {
            for (int c = blk * r; c < blk * r + r - 1; ++c) {
              const int keep[2] = {2 * c, 2 * c + 1};
              f += dn::fidelity(s, keep, ref);
              ++count;
            }
          }
          out.control_fidelity += p * f / count;
          return;
        }
        const int tgt = b * r + r - 1;
        const int t[2] = {2 * tgt, 2 * tgt + 1};
        const auto m = dn::measure_projective(s, t, 2, [](std::span<const int> x) {
          return x[0] ^ x[1];
        });
        for (int k = 0; k < 2; ++k) {
          if (m.probs[static_cast<std::size_t>(k)] > 0.0) {
            rec(m.post[static_cast<std::size_t>(k)], b + 1, odd + k,
                p * m.probs[static_cast<std::size_t>(k)]);
          }
        }
      };
  rec(state, 0, 0, 1.0);
  return out;
}

// Two-copy recurrence round: rotations, bCNOT, Z readout of the target pair,
// keep on agreement. Returns (output Bell weights, success probability).
inline RecurrenceResult dense_recurrence(const BellWeights& w) {
  dn::Mat rho = dn::Mat::Zero(4, 4);
  for (int k = 0; k < 4; ++k) {
    const dn::Vec v = dn::bell_vector(BellIndex::from_flat(k));
    rho += w[static_cast<std::size_t>(k)] * v * v.adjoint();
  }
  dn::DenseState state = dn::tensor(dn::from_matrix(rho, dn::pair_subsystems("1")),
                                    dn::from_matrix(rho, dn::pair_subsystems("2")));
  const double s = 1.0 / std::sqrt(2.0);
  dn::Mat ua(2, 2);
  ua << s, dn::cplx(0, -s), dn::cplx(0, -s), s;  // exp(-i pi X / 4)
  const dn::Mat ub = ua.adjoint();                // exp(+i pi X / 4)
  for (int q : {0, 2}) dn::apply_gate(state, dn::LocalUnitary{q, ua});
  for (int q : {1, 3}) dn::apply_gate(state, dn::LocalUnitary{q, ub});
  dn::apply_gate(state, dn::BcnotGate{0, 1, 2, 3});
  const int t[2] = {2, 3};
  const auto m = dn::measure_projective(state, t, 2, [](std::span<const int> x) {
    return x[0] == x[1] ? 1 : 0;
  });
  RecurrenceResult out;
  out.success_probability = m.probs[1];
  const int keep[2] = {0, 1};
  const dn::Mat red = dn::reduced_matrix(m.post[1], keep);
  for (int k = 0; k < 4; ++k) {
    out.weights[static_cast<std::size_t>(k)] =
        dn::fidelity(red, dn::bell_vector(BellIndex::from_flat(k)));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Suite.

struct FamilyCase {
  Family family;
  double F;
};

inline std::vector<FamilyCase> oracle_families() {
  return {{Family::AmplitudeDamping, 0.8}, {Family::Werner, 0.7}, {Family::Dephasing, 0.85}};
}

inline constexpr int kOracleMaxCopies = 4;
inline constexpr int kOracleMaxAux = 8;

inline std::vector<CheckResult> run_oracle_suite(const OracleOptions& opt = {}) {
  if (opt.max_n < 1 || opt.max_n > kOracleMaxCopies || opt.max_d < 2 ||
      opt.max_d > kOracleMaxAux) {
    throw DimensionCapExceeded("oracle suite runs with 1 <= n <= " +
                               std::to_string(kOracleMaxCopies) + " and 2 <= d <= " +
                               std::to_string(kOracleMaxAux));
  }
  std::vector<CheckResult> out;
  auto add = [&](std::string name, double mismatch) {
    out.push_back({std::move(name), mismatch, kOracleTolerance});
  };
  auto tag = [](const FamilyCase& fc) {
    return std::string(family_name(fc.family)) + "(" + format_number(fc.F) + ")";
  };

  // Gate level: bCNOT on every pair of Bell indices.
  {
    double worst = 0.0;
    for (int a = 0; a < 4; ++a) {
      for (int b = 0; b < 4; ++b) {
        auto st = dn::pure_state(
            {{2, dn::Party::A, "A1"}, {2, dn::Party::B, "B1"}, {2, dn::Party::A, "A2"},
             {2, dn::Party::B, "B2"}},
            dn::kron(dn::bell_vector(BellIndex::from_flat(a)),
                     dn::bell_vector(BellIndex::from_flat(b))));
        dn::apply_gate(st, dn::BcnotGate{0, 1, 2, 3});
        const auto [c, t] = bcnot(BellIndex::from_flat(a), BellIndex::from_flat(b));
        const dn::Vec expect = dn::kron(dn::bell_vector(c), dn::bell_vector(t));
        worst = std::max(worst, 1.0 - std::norm(expect.dot(st.branches()[0].psi)));
      }
    }
    add("bcnot/bell-index-table", worst);
  }

  // Gate level: counter shift of each pure component.
  {
    double worst = 0.0;
    const int d = std::min(opt.max_d, 5);
    for (int c = 0; c < kNumComponents; ++c) {
      std::array<double, kNumComponents> w{};
      w[static_cast<std::size_t>(c)] = 1.0;
      const StateSpec spec(c == 4 ? Family::AmplitudeDamping : Family::BellDiagonal, w);
      const auto dense = dense_counter(spec, 1, d).probs;
      const auto sym = enumerate_counter(spec, 1, d);
      worst = std::max(worst, max_abs_diff(dense, sym));
    }
    add("eng/single-component-shifts", worst);
  }

  for (const auto& fc : oracle_families()) {
    const StateSpec spec = make_state(fc.family, fc.F);

    // P0: outcome distribution.
    for (int n = 1; n <= opt.max_n; ++n) {
      const auto dense = dense_p0(spec, n);
      const auto sym = outcome_distribution(model_for(ProtocolId::P0, fc.family), n,
                                            spec.fidelity())
                           .probs();
      add("p0/" + tag(fc) + "/n=" + std::to_string(n), max_abs_diff(dense, sym));
    }

    // P1: counter distribution, closed form and residual fidelity.
    for (int n = 1; n <= opt.max_n; ++n) {
      const int d = fc.family == Family::Werner ? std::min(2 * n + 1, opt.max_d)
                                                : std::min(n + 1, opt.max_d);
      if (d < 2 || d > opt.max_d) continue;
      const auto dense = dense_counter(spec, n, d);
      const auto sym = enumerate_counter(spec, n, d);
      std::string name = "p1/" + tag(fc) + "/n=" + std::to_string(n) + ",d=" + std::to_string(d);
      double worst = max_abs_diff(dense.probs, sym);
      if (fc.family != Family::Dephasing) {
        worst = std::max(worst, max_abs_diff(sym, model_counter(spec, n, d)));
        const bool unambiguous = d >= minimum_counter_dimension(fc.family, n);
        if (unambiguous) {
          for (int v = 0; v < d; ++v) {
            if (dense.probs[static_cast<std::size_t>(v)] < 1e-12) continue;
            const int j = counter_from_register(fc.family, n, v, d);
            worst = std::max(worst, std::abs(dense.copy_fidelity[static_cast<std::size_t>(v)] -
                                             residual_fidelity(spec, n, j)));
          }
        }
      }
      add(name, worst);
    }

    // P2: probability of outcome M.
    struct P2Case {
      int n, d, m, delta0;
    };
    for (const auto& pc : {P2Case{2, 4, 2, 1}, P2Case{3, 4, 2, 1}, P2Case{2, 6, 3, 2},
                           P2Case{2, 8, 4, 2}, P2Case{3, 8, 4, 3}}) {
      if (pc.n > opt.max_n || pc.d > opt.max_d) continue;
      const CoarseParams dense_params(pc.d, pc.m, pc.delta0);
      const CoarseParams sym_params(pc.d, pc.m, pc.delta0, opt.symbolic_grouping);
      const double dense = dense_p2_measure_prob(spec, pc.n, dense_params);
      const auto counter = enumerate_counter(spec, pc.n, pc.d);
      double sym = 0.0;
      for (int j = 0; j < pc.d; ++j) {
        sym += counter[static_cast<std::size_t>(j)] * coarse_measure_prob(j, sym_params);
      }
      add("p2/" + tag(fc) + "/n=" + std::to_string(pc.n) + ",d=" + std::to_string(pc.d) +
              ",m=" + std::to_string(pc.m) + ",delta0=" + std::to_string(pc.delta0),
          std::abs(dense - sym));
    }

    // P3: odd-block distribution and back-action.
    struct P3Case {
      int blocks, r;
    };
    for (const auto& pc : {P3Case{1, 2}, P3Case{2, 2}, P3Case{1, 3}, P3Case{1, 4}}) {
      if (pc.blocks * pc.r > opt.max_n) continue;
      const auto dense = dense_p3(spec, pc.blocks, pc.r);
      const auto sym = outcome_distribution(model_for(ProtocolId::P3, fc.family, pc.r),
                                            pc.blocks, spec.fidelity())
                           .probs();
      const double worst =
          std::max(max_abs_diff(dense.odd, sym),
                   std::abs(dense.control_fidelity - back_action_fidelity(p3_weights(spec))));
      add("p3/" + tag(fc) + "/blocks=" + std::to_string(pc.blocks) + ",r=" + std::to_string(pc.r),
          worst);
    }
  }

  // P2 recovery of a definite auxiliary.
  for (const auto& c : {CoarseParams(4, 2, 1), CoarseParams(6, 3, 2), CoarseParams(8, 4, 2)}) {
    if (c.d > opt.max_d) continue;
    double worst = 0.0;
    const CoarseParams sym(c.d, c.m, c.delta0, opt.symbolic_grouping);
    for (int j = 0; j < c.d; ++j) {
      worst = std::max(worst, std::abs(dense_p2_recovery(j, c) - coarse_recovery_fidelity(j, sym)));
    }
    add("p2-recovery/d=" + std::to_string(c.d) + ",m=" + std::to_string(c.m) +
            ",delta0=" + std::to_string(c.delta0),
        worst);
  }

  // Recurrence map.
  {
    double worst = 0.0;
    for (const BellWeights& w : {BellWeights{0.7, 0.1, 0.1, 0.1}, BellWeights{0.8, 0.1, 0.0, 0.1},
                                 BellWeights{0.6, 0.05, 0.25, 0.1}, BellWeights{0.25, 0.25, 0.25, 0.25}}) {
      const auto sym = recurrence_step(w);
      const auto dense = dense_recurrence(w);
      worst = std::max(worst, std::abs(sym.success_probability - dense.success_probability));
      for (int k = 0; k < 4; ++k) {
        worst = std::max(worst, std::abs(sym.weights[static_cast<std::size_t>(k)] -
                                         dense.weights[static_cast<std::size_t>(k)]));
      }
    }
    add("recurrence/step", worst);
  }

  // Werner twirl against the weight-level depolarization.
  {
    double worst = 0.0;
    for (const auto& fc : oracle_families()) {
      const StateSpec spec = make_state(fc.family, fc.F);
      const dn::Mat tw = dn::twirl_werner(dn::single_copy(spec, "").matrix());
      const auto w = depolarize(spec, DepolarizeTarget::Werner).bell_weights();
      for (int k = 0; k < 4; ++k) {
        worst = std::max(worst, std::abs(dn::fidelity(tw, dn::bell_vector(BellIndex::from_flat(k))) -
                                         w[static_cast<std::size_t>(k)]));
      }
      // Off-diagonal Bell-basis terms must vanish.
      dn::Mat bell(4, 4);
      for (int k = 0; k < 4; ++k) bell.col(k) = dn::bell_vector(BellIndex::from_flat(k));
      dn::Mat in_bell = bell.adjoint() * tw * bell;
      in_bell.diagonal().setZero();
      worst = std::max(worst, in_bell.cwiseAbs().maxCoeff());
    }
    add("twirl/werner", worst);
  }
  return out;
}

}  // namespace entwit::oracle
