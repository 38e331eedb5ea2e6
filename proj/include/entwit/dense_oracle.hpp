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

// Brute-force simulator used to validate the index-level engine on small
// instances. A DenseState is a density operator kept as a weighted ensemble of
// pure vectors over a list of subsystems, each tagged with the party holding
// it. Gates act on every vector; measurements branch the ensemble.

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "entwit/errors.hpp"
#include "entwit/gate_engine.hpp"
#include "entwit/state_model.hpp"

namespace entwit::dense {

using cplx = std::complex<double>;
using Vec = Eigen::VectorXcd;
using Mat = Eigen::MatrixXcd;

inline constexpr std::size_t kDimensionCap = std::size_t{1} << 16;
inline constexpr std::size_t kMatrixCap = std::size_t{1} << 12;
inline constexpr double kPsdTolerance = 1e-9;
inline constexpr double kInvariantTolerance = 1e-10;

enum class Party { A, B };

struct Subsystem {
  int dim = 2;
  Party party = Party::A;
  std::string name;
};

struct Branch {
  double weight = 0.0;
  Vec psi;
};

class DenseState {
 public:
  DenseState() = default;
  DenseState(std::vector<Subsystem> subsystems, std::vector<Branch> branches)
      : subsystems_(std::move(subsystems)), branches_(std::move(branches)) {
    for (std::size_t i = 0; i < subsystems_.size(); ++i) {
      for (std::size_t k = 0; k < i; ++k) {
        if (subsystems_[k].name == subsystems_[i].name) {
          throw std::invalid_argument("duplicate subsystem name " + subsystems_[i].name);
        }
      }
    }
    const std::size_t dim = dimension();
    for (const auto& b : branches_) {
      if (static_cast<std::size_t>(b.psi.size()) != dim) {
        throw std::invalid_argument("branch vector does not match subsystem dims");
      }
    }
  }

  const std::vector<Subsystem>& subsystems() const { return subsystems_; }
  std::vector<Subsystem>& subsystems() { return subsystems_; }
  const std::vector<Branch>& branches() const { return branches_; }
  std::vector<Branch>& branches() { return branches_; }

  std::size_t dimension() const {
    std::size_t d = 1;
    for (const auto& s : subsystems_) d *= static_cast<std::size_t>(s.dim);
    return d;
  }

  int index_of(const std::string& name) const {
    for (std::size_t i = 0; i < subsystems_.size(); ++i) {
      if (subsystems_[i].name == name) return static_cast<int>(i);
    }
    throw std::invalid_argument("no subsystem named " + name);
  }

  double trace() const {
    double t = 0.0;
    for (const auto& b : branches_) t += b.weight * b.psi.squaredNorm();
    return t;
  }

  Mat matrix() const {
    const std::size_t dim = dimension();
    if (dim > kMatrixCap) {
      throw DimensionCapExceeded("density matrix of dimension " +
                                 std::to_string(dim) + " is too large to materialize");
    }
    Mat rho = Mat::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    for (const auto& b : branches_) rho.noalias() += b.weight * b.psi * b.psi.adjoint();
    return rho;
  }

  double purity() const {
    double p = 0.0;
    for (const auto& a : branches_) {
      for (const auto& b : branches_) {
        p += a.weight * b.weight * std::norm(a.psi.dot(b.psi));
      }
    }
    return p;
  }

  // Hermitian, unit trace, positive semidefinite (within tolerance).
  void check_invariants() const {
    if (std::abs(trace() - 1.0) > kInvariantTolerance) {
      throw std::logic_error("trace deviates from 1");
    }
    for (const auto& b : branches_) {
      if (b.weight < 0.0) throw std::logic_error("negative ensemble weight");
    }
    if (dimension() <= 256) {
      const Mat rho = matrix();
      if ((rho - rho.adjoint()).norm() > kInvariantTolerance) {
        throw std::logic_error("state is not Hermitian");
      }
      Eigen::SelfAdjointEigenSolver<Mat> es(rho, Eigen::EigenvaluesOnly);
      if (es.eigenvalues().minCoeff() < -kPsdTolerance) {
        throw std::logic_error("state is not positive semidefinite");
      }
    }
  }

 private:
  std::vector<Subsystem> subsystems_;
  std::vector<Branch> branches_;
};

// ---------------------------------------------------------------------------
// Index bookkeeping (first subsystem is the most significant digit).

class Layout {
 public:
  explicit Layout(const std::vector<Subsystem>& subs) {
    dims_.reserve(subs.size());
    for (const auto& s : subs) dims_.push_back(s.dim);
    strides_.assign(dims_.size(), 1);
    for (int i = static_cast<int>(dims_.size()) - 2; i >= 0; --i) {
      strides_[i] = strides_[i + 1] * static_cast<std::size_t>(dims_[i + 1]);
    }
    size_ = dims_.empty() ? 1 : strides_[0] * static_cast<std::size_t>(dims_[0]);
  }
  std::size_t size() const { return size_; }
  std::size_t count() const { return dims_.size(); }
  int dim(std::size_t i) const { return dims_[i]; }
  std::size_t stride(std::size_t i) const { return strides_[i]; }

  void decode(std::size_t idx, std::span<int> digits) const {
    for (std::size_t i = 0; i < dims_.size(); ++i) {
      digits[i] = static_cast<int>((idx / strides_[i]) % static_cast<std::size_t>(dims_[i]));
    }
  }
  std::size_t encode(std::span<const int> digits) const {
    std::size_t idx = 0;
    for (std::size_t i = 0; i < dims_.size(); ++i) {
      idx += static_cast<std::size_t>(digits[i]) * strides_[i];
    }
    return idx;
  }

 private:
  std::vector<int> dims_;
  std::vector<std::size_t> strides_;
  std::size_t size_ = 1;
};

// ---------------------------------------------------------------------------
// Elementary states.

inline Vec bell_vector(BellIndex b) {
  // (1 (x) X^j Z^i)(|00> + |11>)/sqrt(2); basis order |ab> -> 2a + b.
  Vec v = Vec::Zero(4);
  const double s = 1.0 / std::sqrt(2.0);
  const double sign = b.phase ? -1.0 : 1.0;
  v(0 * 2 + (0 ^ b.amplitude)) += s;
  v(1 * 2 + (1 ^ b.amplitude)) += sign * s;
  return v;
}

inline Vec component_vector(Component c) {
  if (c == Component::Ket01) {
    Vec v = Vec::Zero(4);
    v(1) = 1.0;
    return v;
  }
  return bell_vector(BellIndex::from_flat(static_cast<int>(c)));
}

// |Phi^d_{mn}> = d^{-1/2} sum_k e^{2 pi i k m / d} |k>_A |k - n>_B.
inline Vec max_entangled(int d, int phase, int amplitude) {
  Vec v = Vec::Zero(static_cast<Eigen::Index>(d) * d);
  const double s = 1.0 / std::sqrt(static_cast<double>(d));
  for (int k = 0; k < d; ++k) {
    const double angle = 2.0 * std::numbers::pi * k * phase / d;
    v(static_cast<Eigen::Index>(k) * d + mod(k - amplitude, d)) =
        s * cplx(std::cos(angle), std::sin(angle));
  }
  return v;
}

inline Vec kron(const Vec& a, const Vec& b) {
  Vec out(a.size() * b.size());
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    out.segment(i * b.size(), b.size()) = a(i) * b;
  }
  return out;
}

inline DenseState tensor(const DenseState& x, const DenseState& y) {
  auto subs = x.subsystems();
  subs.insert(subs.end(), y.subsystems().begin(), y.subsystems().end());
  std::size_t dim = 1;
  for (const auto& s : subs) dim *= static_cast<std::size_t>(s.dim);
  if (dim > kDimensionCap) {
    throw DimensionCapExceeded("joint dimension " + std::to_string(dim) +
                               " exceeds the oracle cap");
  }
  std::vector<Branch> out;
  out.reserve(x.branches().size() * y.branches().size());
  for (const auto& a : x.branches()) {
    for (const auto& b : y.branches()) {
      const double w = a.weight * b.weight;
      if (w > 0.0) out.push_back({w, kron(a.psi, b.psi)});
    }
  }
  return DenseState(std::move(subs), std::move(out));
}

inline DenseState pure_state(std::vector<Subsystem> subs, Vec psi) {
  std::vector<Branch> b;
  b.push_back({1.0, std::move(psi)});
  return DenseState(std::move(subs), std::move(b));
}

inline std::vector<Subsystem> pair_subsystems(const std::string& tag, int dim = 2) {
  return {{dim, Party::A, "A" + tag}, {dim, Party::B, "B" + tag}};
}

// One copy of `spec` as an ensemble over its pure components.
inline DenseState single_copy(const StateSpec& spec, const std::string& tag) {
  std::vector<Branch> branches;
  for (int c = 0; c < kNumComponents; ++c) {
    const double w = spec.weights()[c];
    if (w > 0.0) branches.push_back({w, component_vector(static_cast<Component>(c))});
  }
  return DenseState(pair_subsystems(tag), std::move(branches));
}

// Eigen-decomposes a single-copy density matrix into an ensemble.
inline DenseState from_matrix(const Mat& rho, std::vector<Subsystem> subs) {
  Eigen::SelfAdjointEigenSolver<Mat> es(rho);
  std::vector<Branch> branches;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    const double w = es.eigenvalues()(i);
    if (w < -kPsdTolerance) throw std::logic_error("matrix is not PSD");
    if (w > 1e-15) branches.push_back({w, es.eigenvectors().col(i)});
  }
  return DenseState(std::move(subs), std::move(branches));
}

// n copies (subsystems A1,B1,...,An,Bn) plus an optional |Phi^d_00>
// auxiliary (subsystems Aaux, Baux).
inline DenseState build_ensemble(const StateSpec& spec, int n,
                                 std::optional<int> aux_dim = std::nullopt) {
  if (n < 1) throw std::invalid_argument("need at least one copy");
  std::size_t dim = std::size_t{1} << (2 * n);
  if (aux_dim) dim *= static_cast<std::size_t>(*aux_dim) * static_cast<std::size_t>(*aux_dim);
  if (n > 8 || dim > kDimensionCap) {
    throw DimensionCapExceeded("ensemble dimension exceeds the oracle cap");
  }
  DenseState state = single_copy(spec, "1");
  for (int i = 2; i <= n; ++i) state = tensor(state, single_copy(spec, std::to_string(i)));
  if (aux_dim) {
    state = tensor(state, pure_state({{*aux_dim, Party::A, "Aaux"},
                                      {*aux_dim, Party::B, "Baux"}},
                                     max_entangled(*aux_dim, 0, 0)));
  }
  return state;
}

// ---------------------------------------------------------------------------
// Generic operations.

// Applies the basis permutation |digits> -> |f(digits)>; f edits in place and
// must be a bijection.
inline void apply_permutation(DenseState& state,
                              const std::function<void(std::span<int>)>& f) {
  const Layout layout(state.subsystems());
  const std::size_t D = layout.size();
  std::vector<std::size_t> target(D);
  std::vector<char> hit(D, 0);
  std::vector<int> digits(layout.count());
  for (std::size_t idx = 0; idx < D; ++idx) {
    layout.decode(idx, digits);
    f(digits);
    const std::size_t t = layout.encode(digits);
    if (t >= D || hit[t]) throw std::logic_error("gate is not a permutation");
    hit[t] = 1;
    target[idx] = t;
  }
  for (auto& b : state.branches()) {
    Vec out(static_cast<Eigen::Index>(D));
    for (std::size_t idx = 0; idx < D; ++idx) out(target[idx]) = b.psi(idx);
    b.psi = std::move(out);
  }
}

inline void apply_diagonal(DenseState& state,
                           const std::function<cplx(std::span<const int>)>& phase) {
  const Layout layout(state.subsystems());
  std::vector<int> digits(layout.count());
  std::vector<cplx> diag(layout.size());
  for (std::size_t idx = 0; idx < layout.size(); ++idx) {
    layout.decode(idx, digits);
    diag[idx] = phase(digits);
  }
  for (auto& b : state.branches()) {
    for (std::size_t idx = 0; idx < layout.size(); ++idx) b.psi(idx) *= diag[idx];
  }
}

// Multiplies each branch by `op` acting on the listed subsystems (in that
// order, first most significant). `op` need not be unitary.
inline Vec apply_operator(const Layout& layout, const Vec& psi,
                          std::span<const int> targets, const Mat& op) {
  Eigen::Index sub = 1;
  for (int t : targets) sub *= layout.dim(static_cast<std::size_t>(t));
  if (op.rows() != sub || op.cols() != sub) {
    throw std::invalid_argument("operator shape does not match target subsystems");
  }
  std::vector<std::size_t> offsets(static_cast<std::size_t>(sub));
  {
    std::vector<int> local(targets.size(), 0);
    for (Eigen::Index s = 0; s < sub; ++s) {
      std::size_t off = 0;
      for (std::size_t i = 0; i < targets.size(); ++i) {
        off += static_cast<std::size_t>(local[i]) * layout.stride(static_cast<std::size_t>(targets[i]));
      }
      offsets[static_cast<std::size_t>(s)] = off;
      for (int i = static_cast<int>(targets.size()) - 1; i >= 0; --i) {
        if (++local[i] < layout.dim(static_cast<std::size_t>(targets[i]))) break;
        local[i] = 0;
      }
    }
  }
  std::vector<char> is_target(layout.count(), 0);
  for (int t : targets) is_target[static_cast<std::size_t>(t)] = 1;
  Vec out = Vec::Zero(psi.size());
  Vec gathered(sub);
  std::vector<int> digits(layout.count());
  for (std::size_t base = 0; base < layout.size(); ++base) {
    layout.decode(base, digits);
    bool zero = true;
    for (std::size_t i = 0; i < digits.size() && zero; ++i) zero = !is_target[i] || digits[i] == 0;
    if (!zero) continue;
    for (Eigen::Index s = 0; s < sub; ++s) gathered(s) = psi(base + offsets[static_cast<std::size_t>(s)]);
    const Vec res = op * gathered;
    for (Eigen::Index s = 0; s < sub; ++s) out(base + offsets[static_cast<std::size_t>(s)]) = res(s);
  }
  return out;
}

inline void apply_local(DenseState& state, std::span<const int> targets, const Mat& op) {
  const Layout layout(state.subsystems());
  for (auto& b : state.branches()) b.psi = apply_operator(layout, b.psi, targets, op);
}

struct MeasurementResult {
  std::vector<double> probs;
  std::vector<DenseState> post;  // normalized; empty ensemble when prob == 0
};

inline Mat operator_sqrt(const Mat& e) {
  Eigen::SelfAdjointEigenSolver<Mat> es(e);
  const Eigen::VectorXd ev = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().adjoint();
}

// POVM {E_k} on the listed subsystems; post-measurement branches use the
// Kraus operators sqrt(E_k).
inline MeasurementResult measure(const DenseState& state, std::span<const int> targets,
                                 const std::vector<Mat>& povm) {
  if (povm.empty()) throw std::invalid_argument("empty POVM");
  const Eigen::Index sub = povm.front().rows();
  Mat sum = Mat::Zero(sub, sub);
  for (const auto& e : povm) {
    if (e.rows() != sub || e.cols() != sub) throw std::invalid_argument("POVM shape mismatch");
    if ((e - e.adjoint()).norm() > kInvariantTolerance) {
      throw std::invalid_argument("POVM element is not Hermitian");
    }
    Eigen::SelfAdjointEigenSolver<Mat> es(e, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -kPsdTolerance) {
      throw std::invalid_argument("POVM element is not positive");
    }
    sum += e;
  }
  if ((sum - Mat::Identity(sub, sub)).norm() > kInvariantTolerance) {
    throw std::invalid_argument("POVM elements do not sum to identity");
  }
  const Layout layout(state.subsystems());
  MeasurementResult res;
  for (const auto& e : povm) {
    const Mat kraus = operator_sqrt(e);
    std::vector<Branch> branches;
    double p = 0.0;
    for (const auto& b : state.branches()) {
      Vec v = apply_operator(layout, b.psi, targets, kraus);
      const double nrm = v.squaredNorm();
      if (nrm <= 0.0 || b.weight * nrm < 1e-300) continue;
      p += b.weight * nrm;
      branches.push_back({b.weight * nrm, v / std::sqrt(nrm)});
    }
    for (auto& b : branches) b.weight /= p;
    res.probs.push_back(p);
    res.post.emplace_back(state.subsystems(), std::move(branches));
  }
  return res;
}

// Projective measurement defined by a classifier on the digits of the
// listed subsystems: outcome k projects onto basis states with label k. The
// projectors are diagonal, so each branch is masked rather than multiplied.
inline MeasurementResult measure_projective(const DenseState& state,
                                            std::span<const int> targets, int outcomes,
                                            const std::function<int(std::span<const int>)>& label) {
  if (outcomes < 1) throw std::invalid_argument("need at least one outcome");
  const Layout layout(state.subsystems());
  std::vector<int> labels(layout.size());
  std::vector<int> digits(layout.count());
  std::vector<int> local(targets.size());
  for (std::size_t idx = 0; idx < layout.size(); ++idx) {
    layout.decode(idx, digits);
    for (std::size_t i = 0; i < targets.size(); ++i) {
      local[i] = digits[static_cast<std::size_t>(targets[i])];
    }
    const int k = label(local);
    if (k < 0 || k >= outcomes) throw std::out_of_range("projective label out of range");
    labels[idx] = k;
  }
  MeasurementResult res;
  for (int k = 0; k < outcomes; ++k) {
    std::vector<Branch> branches;
    double p = 0.0;
    for (const auto& b : state.branches()) {
      Vec v = Vec::Zero(b.psi.size());
      for (std::size_t idx = 0; idx < layout.size(); ++idx) {
        if (labels[idx] == k) v(static_cast<Eigen::Index>(idx)) = b.psi(static_cast<Eigen::Index>(idx));
      }
      const double nrm = v.squaredNorm();
      if (nrm <= 0.0 || b.weight * nrm < 1e-300) continue;
      p += b.weight * nrm;
      branches.push_back({b.weight * nrm, v / std::sqrt(nrm)});
    }
    for (auto& b : branches) b.weight /= p;
    res.probs.push_back(p);
    res.post.emplace_back(state.subsystems(), std::move(branches));
  }
  return res;
}

// Reduced density matrix on the listed subsystems (in that order).
inline Mat reduced_matrix(const DenseState& state, std::span<const int> keep) {
  const Layout layout(state.subsystems());
  Eigen::Index kd = 1;
  for (int t : keep) kd *= layout.dim(static_cast<std::size_t>(t));
  std::vector<char> kept(layout.count(), 0);
  for (int t : keep) kept[static_cast<std::size_t>(t)] = 1;
  std::size_t rest = layout.size() / static_cast<std::size_t>(kd);
  // Map each full index to (kept index, rest index).
  std::vector<Eigen::Index> kidx(layout.size());
  std::vector<Eigen::Index> ridx(layout.size());
  std::vector<int> digits(layout.count());
  for (std::size_t idx = 0; idx < layout.size(); ++idx) {
    layout.decode(idx, digits);
    Eigen::Index k = 0;
    for (int t : keep) k = k * layout.dim(static_cast<std::size_t>(t)) + digits[static_cast<std::size_t>(t)];
    Eigen::Index r = 0;
    for (std::size_t i = 0; i < layout.count(); ++i) {
      if (!kept[i]) r = r * layout.dim(i) + digits[i];
    }
    kidx[idx] = k;
    ridx[idx] = r;
  }
  Mat rho = Mat::Zero(kd, kd);
  for (const auto& b : state.branches()) {
    Mat M = Mat::Zero(kd, static_cast<Eigen::Index>(rest));
    for (std::size_t idx = 0; idx < layout.size(); ++idx) M(kidx[idx], ridx[idx]) = b.psi(idx);
    rho.noalias() += b.weight * M * M.adjoint();
  }
  return rho;
}

inline double fidelity(const Mat& rho, const Vec& ref) {
  if (rho.rows() != ref.size()) throw std::invalid_argument("dimension mismatch");
  return std::clamp((ref.adjoint() * rho * ref)(0, 0).real(), 0.0, 1.0);
}

inline double fidelity(const DenseState& state, std::span<const int> keep, const Vec& ref) {
  return fidelity(reduced_matrix(state, keep), ref);
}

inline double trace_distance(const Mat& rho, const Mat& sigma) {
  if (rho.rows() != sigma.rows()) throw std::invalid_argument("dimension mismatch");
  Eigen::SelfAdjointEigenSolver<Mat> es(rho - sigma, Eigen::EigenvaluesOnly);
  return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

// ---------------------------------------------------------------------------
// Protocol gates.

// Bilateral hybrid controlled-X from every copy pair (qubits) into the
// auxiliary qudit pair: X_d |k> = |k - 1>, applied on A and B separately.
struct EngGate {
  std::vector<std::pair<int, int>> controls;  // (A_i, B_i) subsystem indices
  int aux_a = 0;
  int aux_b = 0;
};

// Bilateral coarse-graining map U: |k>|r> -> |k>|r + g(k)> on each side.
struct CoarseGate {
  int src_a = 0, dst_a = 0, src_b = 0, dst_b = 0;
  CoarseParams params;
  bool inverse = false;
  bool b_side_only = false;
};

// Bilateral CNOT between two qubit pairs.
struct BcnotGate {
  int control_a = 0, control_b = 0, target_a = 0, target_b = 0;
};

// Diagonal phase exp(-2 pi i g(k) l / m) on one qudit.
struct PhaseCorrection {
  int subsystem = 0;
  CoarseParams params;
  int outcome = 0;
};

// Single-subsystem unitary (used for the Fourier basis change).
struct LocalUnitary {
  int subsystem = 0;
  Mat unitary;
};

using Gate = std::variant<EngGate, CoarseGate, BcnotGate, PhaseCorrection, LocalUnitary>;

inline void check_dim(const DenseState& s, int idx, int dim) {
  if (idx < 0 || idx >= static_cast<int>(s.subsystems().size()) ||
      s.subsystems()[static_cast<std::size_t>(idx)].dim != dim) {
    throw std::invalid_argument("gate does not match subsystem dimensions");
  }
}

inline void apply_gate(DenseState& state, const Gate& gate) {
  std::visit(
      [&](const auto& g) {
        using T = std::decay_t<decltype(g)>;
        if constexpr (std::is_same_v<T, EngGate>) {
          const int d = state.subsystems()[static_cast<std::size_t>(g.aux_a)].dim;
          check_dim(state, g.aux_b, d);
          for (auto [a, b] : g.controls) {
            check_dim(state, a, 2);
            check_dim(state, b, 2);
          }
          apply_permutation(state, [&](std::span<int> x) {
            for (auto [a, b] : g.controls) {
              x[g.aux_a] = mod(x[g.aux_a] - x[a], d);
              x[g.aux_b] = mod(x[g.aux_b] - x[b], d);
            }
          });
        } else if constexpr (std::is_same_v<T, CoarseGate>) {
          const auto& p = g.params;
          check_dim(state, g.src_b, p.d);
          check_dim(state, g.dst_b, p.m);
          if (!g.b_side_only) {
            check_dim(state, g.src_a, p.d);
            check_dim(state, g.dst_a, p.m);
          }
          const int sgn = g.inverse ? -1 : 1;
          apply_permutation(state, [&](std::span<int> x) {
            if (!g.b_side_only) {
              x[g.dst_a] = mod(x[g.dst_a] + sgn * coarse_group(x[g.src_a], p), p.m);
            }
            x[g.dst_b] = mod(x[g.dst_b] + sgn * coarse_group(x[g.src_b], p), p.m);
          });
        } else if constexpr (std::is_same_v<T, BcnotGate>) {
          for (int i : {g.control_a, g.control_b, g.target_a, g.target_b}) check_dim(state, i, 2);
          apply_permutation(state, [&](std::span<int> x) {
            x[g.target_a] ^= x[g.control_a];
            x[g.target_b] ^= x[g.control_b];
          });
        } else if constexpr (std::is_same_v<T, PhaseCorrection>) {
          check_dim(state, g.subsystem, g.params.d);
          apply_diagonal(state, [&](std::span<const int> x) {
            const double angle = -2.0 * std::numbers::pi *
                                 coarse_group(x[g.subsystem], g.params) * g.outcome /
                                 g.params.m;
            return cplx(std::cos(angle), std::sin(angle));
          });
        } else {
          const int t[1] = {g.subsystem};
          apply_local(state, t, g.unitary);
        }
      },
      gate);
}

// Columns are the generalized Fourier basis |alpha_l> = m^{-1/2} sum_q
// e^{-2 pi i q l / m} |q>.
inline Mat fourier_basis(int m) {
  Mat f(m, m);
  for (int q = 0; q < m; ++q) {
    for (int l = 0; l < m; ++l) {
      const double angle = -2.0 * std::numbers::pi * q * l / m;
      f(q, l) = cplx(std::cos(angle), std::sin(angle)) / std::sqrt(static_cast<double>(m));
    }
  }
  return f;
}

// Single-qubit Paulis.
inline Mat pauli(int k) {
  Mat p = Mat::Zero(2, 2);
  switch (k) {
    case 0: p << 1, 0, 0, 1; break;
    case 1: p << 0, 1, 1, 0; break;
    case 2: p << 0, cplx(0, -1), cplx(0, 1), 0; break;
    default: p << 1, 0, 0, -1; break;
  }
  return p;
}

inline Mat kron(const Mat& a, const Mat& b) {
  Mat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

// Depolarizing twirls on a single two-qubit density matrix. The Bell-diagonal
// twirl averages over sigma_i (x) sigma_i; the Werner twirl further averages
// over U (x) conj(U) for the Clifford cycling X -> Y -> Z.
inline Mat twirl_bell_diagonal(const Mat& rho) {
  Mat out = Mat::Zero(4, 4);
  for (int k = 0; k < 4; ++k) {
    const Mat u = kron(pauli(k), pauli(k));
    out += 0.25 * u * rho * u.adjoint();
  }
  return out;
}

inline Mat twirl_werner(const Mat& rho) {
  const Mat bd = twirl_bell_diagonal(rho);
  Mat c(2, 2);
  c << cplx(0.5, -0.5), cplx(-0.5, -0.5), cplx(0.5, -0.5), cplx(0.5, 0.5);
  const Mat u = kron(c, c.conjugate());
  Mat out = Mat::Zero(4, 4);
  Mat v = Mat::Identity(4, 4);
  for (int k = 0; k < 3; ++k) {
    out += (1.0 / 3.0) * v * bd * v.adjoint();
    v = u * v;
  }
  return out;
}

}  // namespace entwit::dense
