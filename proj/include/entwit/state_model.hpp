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

// Noisy two-qubit states used throughout the library. Every state is held as
// a classical mixture over labeled pure components; Bell states are indexed
// as Psi_{ij} = (1 (x) X^j Z^i) |Phi+>, i the phase and j the amplitude bit.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <string_view>

namespace entwit {

inline constexpr double kNormTolerance = 1e-12;

class Fidelity {
 public:
  constexpr Fidelity() = default;
  explicit Fidelity(double value) : value_(value) {
    if (!(value >= 0.0 && value <= 1.0)) {
      throw std::domain_error("fidelity must lie in [0, 1], got " +
                              std::to_string(value));
    }
  }
  constexpr double value() const { return value_; }
  constexpr operator double() const { return value_; }

 private:
  double value_ = 1.0;
};

struct BellIndex {
  std::uint8_t phase = 0;
  std::uint8_t amplitude = 0;

  friend constexpr bool operator==(BellIndex, BellIndex) = default;
  constexpr int flat() const { return 2 * phase + amplitude; }
  static constexpr BellIndex from_flat(int k) {
    return {static_cast<std::uint8_t>((k >> 1) & 1),
            static_cast<std::uint8_t>(k & 1)};
  }
};

enum class Family { AmplitudeDamping, Dephasing, Werner, BellDiagonal };

// Pure components a StateSpec can mix. Ket01 is the product state |01>.
enum class Component : int { Psi00 = 0, Psi01, Psi10, Psi11, Ket01 };
inline constexpr int kNumComponents = 5;

// Bell weights in the order p(Psi00), p(Psi01), p(Psi10), p(Psi11).
using BellWeights = std::array<double, 4>;

class StateSpec {
 public:
  StateSpec(Family family, std::array<double, kNumComponents> weights)
      : family_(family), weights_(weights) {
    double sum = 0.0;
    for (double w : weights_) {
      if (!(w >= 0.0)) throw std::domain_error("negative mixture weight");
      sum += w;
    }
    if (std::abs(sum - 1.0) > kNormTolerance) {
      throw std::domain_error("mixture weights must sum to 1");
    }
    if (family_ != Family::AmplitudeDamping &&
        weights_[static_cast<int>(Component::Ket01)] != 0.0) {
      throw std::domain_error("only amplitude-damping states contain |01>");
    }
  }

  Family family() const { return family_; }
  double weight(Component c) const { return weights_[static_cast<int>(c)]; }
  const std::array<double, kNumComponents>& weights() const { return weights_; }
  Fidelity fidelity() const {
    return Fidelity(std::min(1.0, weight(Component::Psi00)));
  }
  bool is_bell_diagonal() const { return family_ != Family::AmplitudeDamping; }

  // Only valid for Bell-diagonal families; use depolarize() otherwise.
  BellWeights bell_weights() const {
    if (!is_bell_diagonal()) {
      throw std::logic_error("amplitude-damping states are not Bell diagonal");
    }
    return {weights_[0], weights_[1], weights_[2], weights_[3]};
  }

  friend bool operator==(const StateSpec&, const StateSpec&) = default;

 private:
  Family family_;
  std::array<double, kNumComponents> weights_;
};

inline std::string_view family_name(Family f) {
  switch (f) {
    case Family::AmplitudeDamping: return "amplitude_damping";
    case Family::Dephasing: return "dephasing";
    case Family::Werner: return "werner";
    case Family::BellDiagonal: return "bell_diagonal";
  }
  return "unknown";
}

// Accepts the canonical names plus the short CLI aliases.
inline Family parse_family(std::string_view s) {
  if (s == "amplitude_damping" || s == "amp" || s == "ad") {
    return Family::AmplitudeDamping;
  }
  if (s == "dephasing" || s == "deph") return Family::Dephasing;
  if (s == "werner") return Family::Werner;
  if (s == "bell_diagonal" || s == "bd") return Family::BellDiagonal;
  throw std::invalid_argument("unknown state family '" + std::string(s) + "'");
}

inline StateSpec make_bell_diagonal(const BellWeights& w) {
  return StateSpec(Family::BellDiagonal, {w[0], w[1], w[2], w[3], 0.0});
}

inline StateSpec make_state(Family family, Fidelity F) {
  const double f = F.value();
  switch (family) {
    case Family::AmplitudeDamping:
      return StateSpec(family, {f, 0.0, 0.0, 0.0, 1.0 - f});
    case Family::Dephasing:
      return StateSpec(family, {f, 0.0, 1.0 - f, 0.0, 0.0});
    case Family::Werner: {
      const double w = (1.0 - f) / 3.0;
      return StateSpec(family, {f, w, w, w, 0.0});
    }
    case Family::BellDiagonal:
      throw std::invalid_argument(
          "bell_diagonal states are built from explicit weights");
  }
  throw std::invalid_argument("unknown family");
}

inline StateSpec make_state(Family family, double F) {
  return make_state(family, Fidelity(F));
}

enum class DepolarizeTarget { BellDiagonal, Werner };

// Bell-diagonal twirl keeps only the Bell-basis diagonal; |01><01| has
// diagonal weight 1/2 on Psi01 and Psi11. The Werner twirl then equalizes the
// three error weights. Both preserve the Psi00 weight.
inline StateSpec depolarize(const StateSpec& spec, DepolarizeTarget target) {
  BellWeights bd;
  if (spec.is_bell_diagonal()) {
    bd = spec.bell_weights();
  } else {
    const double k = spec.weight(Component::Ket01);
    bd = {spec.weight(Component::Psi00), spec.weight(Component::Psi01) + k / 2,
          spec.weight(Component::Psi10), spec.weight(Component::Psi11) + k / 2};
  }
  if (target == DepolarizeTarget::BellDiagonal) {
    if (spec.is_bell_diagonal()) return spec;
    return make_bell_diagonal(bd);
  }
  const double off = (1.0 - bd[0]) / 3.0;
  return StateSpec(Family::Werner, {bd[0], off, off, off, 0.0});
}

inline BellWeights bell_diagonal_weights(const StateSpec& spec) {
  return depolarize(spec, DepolarizeTarget::BellDiagonal).bell_weights();
}

inline double shannon_entropy_bits(const BellWeights& w) {
  double s = 0.0;
  for (double p : w) {
    if (p > 0.0) s -= p * std::log2(p);
  }
  return s;
}

inline double bell_diagonal_entropy(const StateSpec& spec) {
  return shannon_entropy_bits(bell_diagonal_weights(spec));
}

// ---------------------------------------------------------------------------
// Error labels: how a single copy acts as control of the counter gate.

enum class ErrorLabel : int { Good = 0, Type1, Type2, Type3, Z00, Z11 };
inline constexpr int kNumLabels = 6;

inline std::string_view label_name(ErrorLabel l) {
  switch (l) {
    case ErrorLabel::Good: return "good";
    case ErrorLabel::Type1: return "type1";
    case ErrorLabel::Type2: return "type2";
    case ErrorLabel::Type3: return "type3";
    case ErrorLabel::Z00: return "z00";
    case ErrorLabel::Z11: return "z11";
  }
  return "?";
}

// +1 for |01>, -1 for |10>, 0 for every counter-invariant component.
inline constexpr int counter_step(ErrorLabel l) {
  return l == ErrorLabel::Type1 ? 1 : (l == ErrorLabel::Type2 ? -1 : 0);
}

struct LabelDistribution {
  std::array<double, kNumLabels> probs{};

  double operator[](ErrorLabel l) const { return probs[static_cast<int>(l)]; }
  double& operator[](ErrorLabel l) { return probs[static_cast<int>(l)]; }
  double shift_up() const { return (*this)[ErrorLabel::Type1]; }
  double shift_down() const { return (*this)[ErrorLabel::Type2]; }
  double invariant() const { return 1.0 - shift_up() - shift_down(); }
  double total() const { return std::accumulate(probs.begin(), probs.end(), 0.0); }
};

// Werner states are split as q Psi00 + (1-q)/4 (|00>,|01>,|10>,|11>) when
// q >= 0. Below F = 1/4 the Psi00 weight is absorbed into |00>,|11> and the
// remainder of Psi10 becomes a type-3 component, keeping all weights
// non-negative. Generic Bell-diagonal states map Psi01/Psi11 to equal halves
// of type-1 and type-2 since both live in span{|01>, |10>}.
inline LabelDistribution error_label_distribution(const StateSpec& spec) {
  LabelDistribution out;
  switch (spec.family()) {
    case Family::AmplitudeDamping:
      out[ErrorLabel::Good] = spec.weight(Component::Psi00);
      out[ErrorLabel::Type1] = spec.weight(Component::Ket01);
      break;
    case Family::Dephasing:
      out[ErrorLabel::Good] = spec.weight(Component::Psi00);
      out[ErrorLabel::Type3] = spec.weight(Component::Psi10);
      break;
    case Family::Werner: {
      const double f = spec.weight(Component::Psi00);
      const double w = (1.0 - f) / 3.0;
      if (f >= w) {
        const double q = f - w;
        out[ErrorLabel::Good] = q;
        out[ErrorLabel::Z00] = w;
        out[ErrorLabel::Z11] = w;
      } else {
        out[ErrorLabel::Z00] = f;
        out[ErrorLabel::Z11] = f;
        out[ErrorLabel::Type3] = w - f;
      }
      out[ErrorLabel::Type1] = w;
      out[ErrorLabel::Type2] = w;
      break;
    }
    case Family::BellDiagonal: {
      const auto w = spec.bell_weights();
      out[ErrorLabel::Good] = w[0];
      out[ErrorLabel::Type3] = w[2];
      out[ErrorLabel::Type1] = (w[1] + w[3]) / 2;
      out[ErrorLabel::Type2] = (w[1] + w[3]) / 2;
      break;
    }
  }
  return out;
}

}  // namespace entwit
