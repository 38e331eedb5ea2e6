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

// Index-level simulation of the counter gate, the error number gate (ENG),
// bilateral CNOTs and the coarse-graining register map. Nothing here touches
// a state vector: copies are represented by error labels or Bell indices and
// the auxiliary qudit by its amplitude index.

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "entwit/state_model.hpp"

namespace entwit {

inline constexpr int mod(long long a, int d) {
  const long long r = a % d;
  return static_cast<int>(r < 0 ? r + d : r);
}

struct AmplitudeRegister {
  int value = 0;
  int dim = 2;

  AmplitudeRegister() = default;
  AmplitudeRegister(int j, int d) : value(j), dim(d) {
    if (d < 2) throw std::invalid_argument("register dimension must be >= 2");
    if (j < 0 || j >= d) throw std::out_of_range("amplitude index out of range");
  }
  friend bool operator==(const AmplitudeRegister&,
                         const AmplitudeRegister&) = default;
};

struct ErrorConfig {
  std::vector<ErrorLabel> labels;

  ErrorConfig() = default;
  explicit ErrorConfig(std::vector<ErrorLabel> l) : labels(std::move(l)) {}
  std::size_t size() const { return labels.size(); }
  int count(ErrorLabel l) const {
    int c = 0;
    for (auto x : labels) c += (x == l);
    return c;
  }
};

inline AmplitudeRegister counter_shift(ErrorLabel label, AmplitudeRegister reg) {
  return {mod(static_cast<long long>(reg.value) + counter_step(label), reg.dim),
          reg.dim};
}

// Folds the counter gate of every copy into a fresh |Phi_00^d> auxiliary.
inline AmplitudeRegister apply_eng(const ErrorConfig& config, int d) {
  if (config.labels.empty()) throw std::invalid_argument("empty ensemble");
  AmplitudeRegister reg(0, d);
  for (auto label : config.labels) reg = counter_shift(label, reg);
  return reg;
}

// Bilateral CNOT on Bell indices: (i,j),(k,l) -> (i^k, j),(k, l^j).
inline std::pair<BellIndex, BellIndex> bcnot(BellIndex control, BellIndex target) {
  return {BellIndex{static_cast<std::uint8_t>(control.phase ^ target.phase),
                    control.amplitude},
          BellIndex{target.phase,
                    static_cast<std::uint8_t>(target.amplitude ^ control.amplitude)}};
}

// Applies bCNOTs from every member of `block` except the last into the last
// one, updating the controls in place (phase back-action) and the target.
// Returns the amplitude bit a computational-basis readout of the target shows.
inline int apply_block_parity(std::span<BellIndex> block) {
  if (block.empty()) throw std::invalid_argument("empty block");
  BellIndex& target = block.back();
  for (std::size_t i = 0; i + 1 < block.size(); ++i) {
    auto [c, t] = bcnot(block[i], target);
    block[i] = c;
    target = t;
  }
  return target.amplitude;
}

inline int block_parity(std::span<const BellIndex> block) {
  std::vector<BellIndex> scratch(block.begin(), block.end());
  return apply_block_parity(scratch);
}

// ---------------------------------------------------------------------------
// Coarse graining.

// How the auxiliary index k is grouped before being written into the
// m-dimensional extra register.
//   Ceiling:     ceil(k / (d/m)) mod m, the register map as usually written.
//   Floor:       floor(k / (d/m)). A cyclic rotation of Ceiling, so both give
//                identical measurement statistics.
//   Interleaved: k mod m. Not a coarse graining at all; kept as a negative
//                control for the oracle cross-check.
enum class Grouping { Ceiling, Floor, Interleaved };

inline std::string_view grouping_name(Grouping g) {
  switch (g) {
    case Grouping::Ceiling: return "ceiling";
    case Grouping::Floor: return "floor";
    case Grouping::Interleaved: return "interleaved";
  }
  return "?";
}

struct CoarseParams {
  int d = 2;
  int m = 1;
  int delta0 = 1;
  Grouping grouping = Grouping::Ceiling;

  CoarseParams() = default;
  CoarseParams(int d_, int m_, int delta0_, Grouping g = Grouping::Ceiling)
      : d(d_), m(m_), delta0(delta0_), grouping(g) {
    validate();
  }

  void validate() const {
    if (d < 2) throw std::invalid_argument("auxiliary dimension d must be >= 2");
    if (m < 1 || m > d) throw std::invalid_argument("need 1 <= m <= d");
    if (d % m != 0) {
      throw std::invalid_argument("extra register dimension m=" +
                                  std::to_string(m) + " must divide d=" +
                                  std::to_string(d));
    }
    if (delta0 < 1 || delta0 > m) {
      throw std::invalid_argument("need 1 <= delta0 <= m");
    }
  }
  int group_width() const { return d / m; }
};

inline int coarse_group(int k, const CoarseParams& p) {
  if (k < 0 || k >= p.d) throw std::out_of_range("k outside Z_d");
  const int w = p.group_width();
  switch (p.grouping) {
    case Grouping::Ceiling: return ((k + w - 1) / w) % p.m;
    case Grouping::Floor: return k / w;
    case Grouping::Interleaved: return k % p.m;
  }
  return 0;
}

// Number of k in Z_d whose register difference g(k+j) - g(k) (mod m) falls in
// {0, ..., delta0-1}; outcome M has probability count/d.
inline int coarse_measure_count(int j, const CoarseParams& p) {
  if (j < 0 || j >= p.d) throw std::out_of_range("j outside Z_d");
  int count = 0;
  for (int k = 0; k < p.d; ++k) {
    const int diff = mod(coarse_group((k + j) % p.d, p) - coarse_group(k, p), p.m);
    count += diff < p.delta0;
  }
  return count;
}

inline double coarse_measure_prob(int j, const CoarseParams& p) {
  return static_cast<double>(coarse_measure_count(j, p)) / p.d;
}

// Classification of j into the four plateau/transition sets.
enum class LambdaSet { L1 = 1, L2 = 2, L3 = 3, L4 = 4 };

inline LambdaSet lambda_set(int j, const CoarseParams& p) {
  if (j < 0 || j >= p.d) throw std::out_of_range("j outside Z_d");
  const int w = p.group_width();
  if (j <= w * (p.delta0 - 1)) return LambdaSet::L1;
  if (j <= p.delta0 * w - 1) return LambdaSet::L2;
  if (j <= w * (p.m - 1)) return LambdaSet::L3;
  return LambdaSet::L4;
}

// Expected fidelity of the recovered auxiliary for a definite j: the
// post-measurement branch with outcome probability p keeps a fraction p of
// the k-terms, so the branch fidelity is p itself.
inline double coarse_recovery_fidelity(int j, const CoarseParams& p) {
  const double pm = coarse_measure_prob(j, p);
  return pm * pm + (1.0 - pm) * (1.0 - pm);
}

}  // namespace entwit
