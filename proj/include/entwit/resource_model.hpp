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

// Entanglement accounting: purification yield of recurrence + hashing, the
// yield curve over fidelity, and conversion of ebit costs into copies.

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>
#include <vector>

#include "entwit/state_model.hpp"

namespace entwit {

struct ResourceLedger {
  int copies_measured = 0;
  int copies_retained = 0;
  double ebits_consumed = 0.0;
  int copies_equiv = 0;  // ceil(ebits / Y); -1 when the yield is zero

  bool feasible() const { return copies_equiv >= 0; }
  int total() const {
    return feasible() ? copies_measured + copies_equiv
                      : std::numeric_limits<int>::max();
  }
};

// Number of noisy copies spent to distill `ebits` perfect ebits at yield Y.
inline int copies_for_ebits(double ebits, double yield) {
  if (ebits < 0.0) throw std::invalid_argument("negative ebit count");
  if (ebits == 0.0) return 0;
  if (!(yield > 0.0)) return -1;
  // Guard against ebits/Y landing a hair above an integer through rounding.
  return static_cast<int>(std::ceil(ebits / yield - 1e-12));
}

inline ResourceLedger with_yield(ResourceLedger ledger, double yield) {
  ledger.copies_equiv = copies_for_ebits(ledger.ebits_consumed, yield);
  return ledger;
}

inline double hashing_yield(const BellWeights& w) {
  return std::max(0.0, 1.0 - shannon_entropy_bits(w));
}

inline double hashing_yield(const StateSpec& spec) {
  return hashing_yield(bell_diagonal_weights(spec));
}

struct RecurrenceResult {
  BellWeights weights;
  double success_probability = 0.0;
};

// One round of the two-copy recurrence protocol on Bell-diagonal weights.
// Both pairs get the local rotation exp(-i pi X/4) (x) exp(i pi X/4), which
// swaps the Psi10 and Psi11 weights; then a bilateral CNOT is applied and the
// target is measured in Z (x) Z, keeping the control when both sides agree.
// On agreement the amplitude bits coincide and the control phase picks up the
// target phase.
inline RecurrenceResult recurrence_step(const BellWeights& in) {
  const BellWeights w{in[0], in[1], in[3], in[2]};
  // Index as w[2*phase + amplitude].
  auto p = [&](int phase, int amp) { return w[2 * phase + amp]; };
  BellWeights out{};
  double total = 0.0;
  for (int amp = 0; amp < 2; ++amp) {
    for (int i = 0; i < 2; ++i) {
      for (int k = 0; k < 2; ++k) {
        const double x = p(i, amp) * p(k, amp);
        out[2 * (i ^ k) + amp] += x;
        total += x;
      }
    }
  }
  if (total <= 0.0) throw std::logic_error("recurrence round cannot succeed");
  for (double& x : out) x /= total;
  return {out, total};
}

inline constexpr int kMaxRecurrenceRounds = 10;

// Best of: hashing after k recurrence rounds (k = 0..k_max), each round
// costing two pairs per attempt.
inline double raw_combined_yield(const BellWeights& start,
                                 int k_max = kMaxRecurrenceRounds) {
  double best = hashing_yield(start);
  BellWeights w = start;
  double factor = 1.0;
  for (int k = 1; k <= k_max; ++k) {
    const auto r = recurrence_step(w);
    factor *= r.success_probability / 2.0;
    w = r.weights;
    best = std::max(best, factor * hashing_yield(w));
  }
  return best;
}

// Yield over a uniform fidelity grid for one state family. values() holds the
// best strategy at each grid point (mixing strategies at a fixed input F never
// beats the best one). envelope() is the upper concave envelope of those
// points across F; it is kept for comparison only, since mixing ensembles of
// different input fidelity is not an operation available to the protocols.
class YieldCurve {
 public:
  static YieldCurve build(Family family, int points = 201,
                          int k_max = kMaxRecurrenceRounds) {
    if (family == Family::BellDiagonal) {
      throw std::invalid_argument("yield curves need a one-parameter family");
    }
    if (points < 2) throw std::invalid_argument("need at least two grid points");
    YieldCurve c;
    c.family_ = family;
    for (int i = 0; i < points; ++i) {
      const double F = static_cast<double>(i) / (points - 1);
      c.F_.push_back(F);
      c.Y_.push_back(
          raw_combined_yield(bell_diagonal_weights(make_state(family, F)), k_max));
    }
    c.hull_ = upper_concave_envelope(c.F_, c.Y_);
    return c;
  }

  Family family() const { return family_; }
  const std::vector<double>& grid() const { return F_; }
  const std::vector<double>& values() const { return Y_; }
  const std::vector<double>& envelope() const { return hull_; }

  double operator()(double F) const { return interpolate(Y_, F); }
  double envelope_at(double F) const { return interpolate(hull_, F); }

 private:
  double interpolate(const std::vector<double>& y, double F) const {
    if (F <= F_.front()) return y.front();
    if (F >= F_.back()) return y.back();
    const auto it = std::upper_bound(F_.begin(), F_.end(), F);
    const std::size_t hi = static_cast<std::size_t>(it - F_.begin());
    const std::size_t lo = hi - 1;
    if (y[lo] == 0.0) return 0.0;
    const double t = (F - F_[lo]) / (F_[hi] - F_[lo]);
    return y[lo] + t * (y[hi] - y[lo]);
  }

  // Monotone-chain upper hull over the points with positive yield; zero below.
  static std::vector<double> upper_concave_envelope(const std::vector<double>& x,
                                                    const std::vector<double>& y) {
    std::vector<double> out(y.size(), 0.0);
    std::size_t first = 0;
    while (first < y.size() && y[first] <= 0.0) ++first;
    if (first == y.size()) return out;
    std::vector<std::size_t> hull;
    for (std::size_t i = first; i < y.size(); ++i) {
      while (hull.size() >= 2) {
        const std::size_t a = hull[hull.size() - 2];
        const std::size_t b = hull.back();
        const double cross = (x[b] - x[a]) * (y[i] - y[a]) - (y[b] - y[a]) * (x[i] - x[a]);
        if (cross >= 0.0) {
          hull.pop_back();
        } else {
          break;
        }
      }
      hull.push_back(i);
    }
    for (std::size_t h = 0; h + 1 < hull.size(); ++h) {
      const std::size_t a = hull[h];
      const std::size_t b = hull[h + 1];
      for (std::size_t i = a; i <= b; ++i) {
        out[i] = y[a] + (y[b] - y[a]) * (x[i] - x[a]) / (x[b] - x[a]);
      }
    }
    out[hull.back()] = y[hull.back()];
    return out;
  }

  Family family_ = Family::Werner;
  std::vector<double> F_;
  std::vector<double> Y_;
  std::vector<double> hull_;
};

// Shared read-only curve per family, built on first use.
inline const YieldCurve& default_yield_curve(Family family) {
  switch (family) {
    case Family::AmplitudeDamping: {
      static const YieldCurve c = YieldCurve::build(Family::AmplitudeDamping);
      return c;
    }
    case Family::Dephasing: {
      static const YieldCurve c = YieldCurve::build(Family::Dephasing);
      return c;
    }
    case Family::Werner: {
      static const YieldCurve c = YieldCurve::build(Family::Werner);
      return c;
    }
    case Family::BellDiagonal: break;
  }
  throw std::invalid_argument("no default yield curve for bell_diagonal states");
}

// Best strategy evaluated at the exact input weights. Grid interpolation
// would overestimate the yield between nodes (the curve is convex), so the
// copy accounting uses this direct value.
inline double combined_yield(const StateSpec& spec, int k_max = kMaxRecurrenceRounds) {
  return raw_combined_yield(bell_diagonal_weights(spec), k_max);
}

}  // namespace entwit
