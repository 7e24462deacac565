// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qsl/circuit.hpp"
#include "qsl/common.hpp"
#include "qsl/shadows.hpp"
#include "qsl/state.hpp"

namespace qsl {

struct CostReport {
  std::string kind;  // "hst" | "global" | "local" | "test"
  double value = 0.0;
  std::optional<double> stderr_;
  int n_terms = 0;
  std::string params_hash;
};

inline std::string params_hash(const std::vector<double>& params) {
  return hex64(fnv1a(params.data(), params.size() * sizeof(double)));
}

// --- exact costs ------------------------------------------------------------

/// 1 - |Tr[U^dag V]|^2 / d^2; zero exactly when the unitaries agree up to
/// a global phase.
inline double hst_cost(const MatrixX& u, const MatrixX& v) {
  if (u.rows() != v.rows() || u.cols() != v.cols())
    throw ValidationError("hst_cost: dimension mismatch");
  const cplx tr = (u.adjoint() * v).trace();
  const double d = static_cast<double>(u.rows());
  return 1.0 - std::norm(tr) / (d * d);
}

inline double hst_cost(const Circuit& target, const Circuit& model,
                       const std::vector<double>& params) {
  return hst_cost(dense_unitary(target), dense_unitary(model, params));
}

/// 1 - (1/N) sum_j |<psi_j| U^dag V |psi_j>|^2 over explicit input states.
inline double global_cost_exact(const Circuit& target, const Circuit& model,
                                const std::vector<double>& params,
                                const std::vector<StateVector>& inputs) {
  if (inputs.empty()) throw ValidationError("global_cost_exact: no input states");
  double acc = 0.0;
  for (const auto& psi : inputs) {
    const StateVector a = apply_circuit(psi, target);
    const StateVector b = apply_circuit(psi, model, params);
    acc += std::norm(overlap(a, b));
  }
  return 1.0 - acc / static_cast<double>(inputs.size());
}

/// Local product-state cost
///   1 - (1/(nN)) sum_{j,i} || (<psi_i^j| (x) I) V^dag U |psi^j> ||^2,
/// evaluated through statevectors, no dense matrices.
inline double local_cost_exact(const Circuit& target, const Circuit& model,
                               const std::vector<double>& params,
                               const std::vector<ProductState>& inputs) {
  if (inputs.empty()) throw ValidationError("local_cost_exact: no input states");
  const int n = target.n;
  double acc = 0.0;
  for (const auto& ps : inputs) {
    if (ps.n() != n) throw ValidationError("local_cost_exact: input size mismatch");
    const StateVector evolved = apply_circuit(to_statevector(ps), target);
    const StateVector back = apply_circuit_adjoint(evolved, model, params);
    for (int i = 0; i < n; ++i) {
      // project qubit i onto its input factor and take the residual norm
      const cplx f0 = std::conj(ps.factors[static_cast<std::size_t>(i)][0]);
      const cplx f1 = std::conj(ps.factors[static_cast<std::size_t>(i)][1]);
      const std::uint64_t bit = std::uint64_t{1} << i;
      double prob = 0.0;
      for (std::uint64_t x = 0; x < back.dim(); ++x) {
        if (x & bit) continue;
        prob += std::norm(f0 * back.amps[x] + f1 * back.amps[x | bit]);
      }
      acc += prob;
    }
  }
  return 1.0 - acc / static_cast<double>(inputs.size() * static_cast<std::size_t>(n));
}

// --- light-cone back-propagation ---------------------------------------------

enum class ConjugationDirection {
  kModelHeisenberg,  // V^dag O V: gates processed last-to-first
  kModelSchrodinger  // V O V^dag: gates processed first-to-last
};

namespace detail {

/// Embeds `op` (on `support`) into `new_support` (superset, sorted).
inline MatrixX embed_operator(const MatrixX& op, const std::vector<int>& support,
                              const std::vector<int>& new_support) {
  const int k_old = static_cast<int>(support.size());
  const int k_new = static_cast<int>(new_support.size());
  std::vector<int> position(static_cast<std::size_t>(k_old));
  for (int i = 0; i < k_old; ++i) {
    auto it = std::lower_bound(new_support.begin(), new_support.end(), support[static_cast<std::size_t>(i)]);
    position[static_cast<std::size_t>(i)] = static_cast<int>(it - new_support.begin());
  }
  const std::size_t dim_new = std::size_t{1} << k_new;
  MatrixX out = MatrixX::Zero(static_cast<Eigen::Index>(dim_new), static_cast<Eigen::Index>(dim_new));
  // out = op (on mapped bits) tensor identity (on the rest)
  std::uint64_t old_bits_mask = 0;
  for (int i = 0; i < k_old; ++i) old_bits_mask |= std::uint64_t{1} << position[static_cast<std::size_t>(i)];
  auto gather = [&](std::uint64_t idx_new) {
    std::uint64_t idx_old = 0;
    for (int i = 0; i < k_old; ++i)
      if ((idx_new >> position[static_cast<std::size_t>(i)]) & 1) idx_old |= std::uint64_t{1} << i;
    return idx_old;
  };
  for (std::uint64_t r = 0; r < dim_new; ++r) {
    const std::uint64_t r_rest = r & ~old_bits_mask;
    const std::uint64_t r_old = gather(r);
    for (std::uint64_t c = 0; c < dim_new; ++c) {
      if ((c & ~old_bits_mask) != r_rest) continue;  // identity off the old support
      out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          op(static_cast<Eigen::Index>(r_old), static_cast<Eigen::Index>(gather(c)));
    }
  }
  return out;
}

/// Conjugates `op` in place by a gate acting on `targets` (subset of
/// support, positions resolved against the sorted support list). Row and
/// column groups are mixed directly; no embedded gate matrix is built.
inline void conjugate_in_support(MatrixX& op, const std::vector<int>& support,
                                 const MatrixX& gate, const std::vector<int>& targets) {
  const int k = static_cast<int>(support.size());
  std::vector<int> pos(targets.size());
  for (std::size_t i = 0; i < targets.size(); ++i) {
    auto it = std::lower_bound(support.begin(), support.end(), targets[i]);
    pos[i] = static_cast<int>(it - support.begin());
  }
  const std::uint64_t dim = std::uint64_t{1} << k;
  const int block = targets.size() == 1 ? 2 : 4;
  std::uint64_t bits[2] = {std::uint64_t{1} << pos[0], 0};
  if (block == 4) bits[1] = std::uint64_t{1} << pos[1];
  const std::uint64_t group_mask = bits[0] | bits[1];
  auto member = [&](std::uint64_t base, int g) {
    return base | ((g & 1) ? bits[0] : 0) | ((g & 2) ? bits[1] : 0);
  };
  std::array<cplx, 4> scratch;
  // op <- G op
  for (std::uint64_t c = 0; c < dim; ++c)
    for (std::uint64_t base = 0; base < dim; ++base) {
      if (base & group_mask) continue;
      for (int g = 0; g < block; ++g)
        scratch[static_cast<std::size_t>(g)] =
            op(static_cast<Eigen::Index>(member(base, g)), static_cast<Eigen::Index>(c));
      for (int r = 0; r < block; ++r) {
        cplx v(0.0, 0.0);
        for (int g = 0; g < block; ++g) v += gate(r, g) * scratch[static_cast<std::size_t>(g)];
        op(static_cast<Eigen::Index>(member(base, r)), static_cast<Eigen::Index>(c)) = v;
      }
    }
  // op <- op G^dag
  for (std::uint64_t r = 0; r < dim; ++r)
    for (std::uint64_t base = 0; base < dim; ++base) {
      if (base & group_mask) continue;
      for (int g = 0; g < block; ++g)
        scratch[static_cast<std::size_t>(g)] =
            op(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(member(base, g)));
      for (int c = 0; c < block; ++c) {
        cplx v(0.0, 0.0);
        for (int g = 0; g < block; ++g)
          v += scratch[static_cast<std::size_t>(g)] * std::conj(gate(c, g));
        op(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(member(base, c))) = v;
      }
    }
}

}  // namespace detail

/// Conjugates the projector |factor><factor| on `site` through the model
/// circuit, growing the support set by static gate connectivity (a sound
/// over-approximation of the light cone). Gates that never intersect the
/// running support cancel exactly and are skipped.
inline SupportOperator conjugate_site_projector(const Circuit& model,
                                                const std::vector<double>& params, int site,
                                                const std::array<cplx, 2>& factor,
                                                ConjugationDirection direction,
                                                int support_cap = kSupportCap) {
  if (site < 0 || site >= model.n)
    throw ValidationError("conjugate_site_projector: site out of range");
  validate_factor(factor);
  SupportOperator op;
  op.support = {site};
  op.matrix = MatrixX(2, 2);
  op.matrix(0, 0) = factor[0] * std::conj(factor[0]);
  op.matrix(0, 1) = factor[0] * std::conj(factor[1]);
  op.matrix(1, 0) = factor[1] * std::conj(factor[0]);
  op.matrix(1, 1) = factor[1] * std::conj(factor[1]);

  const bool reverse = direction == ConjugationDirection::kModelHeisenberg;
  const std::size_t count = model.gates.size();
  for (std::size_t step = 0; step < count; ++step) {
    const Gate& g = model.gates[reverse ? count - 1 - step : step];
    std::vector<int> targets(g.targets.begin(), g.targets.begin() + g.arity);
    bool touches = false;
    for (int t : targets)
      touches |= std::binary_search(op.support.begin(), op.support.end(), t);
    if (!touches) continue;
    std::vector<int> merged = op.support;
    for (int t : targets)
      if (!std::binary_search(merged.begin(), merged.end(), t))
        merged.insert(std::upper_bound(merged.begin(), merged.end(), t), t);
    if (static_cast<int>(merged.size()) > support_cap)
      throw ResourceError(
          "conjugate_site_projector: light-cone support exceeds cap " +
          std::to_string(support_cap) + "; consider the Clifford-shadow path");
    if (merged.size() != op.support.size()) {
      op.matrix = detail::embed_operator(op.matrix, op.support, merged);
      op.support = std::move(merged);
    }
    MatrixX m = gate_matrix(g, params);
    if (reverse) m.adjointInPlace();
    detail::conjugate_in_support(op.matrix, op.support, m, targets);
  }
  // numerical Hermitization: conjugation preserves Hermiticity up to roundoff
  op.matrix = (0.5 * (op.matrix + op.matrix.adjoint())).eval();
  return op;
}

/// O_i(theta) = V (|factor><factor|_site (x) I) V^dag restricted to its
/// light-cone support.
inline SupportOperator backpropagate_site_observable(const Circuit& model,
                                                     const std::vector<double>& params, int site,
                                                     const std::array<cplx, 2>& factor,
                                                     int support_cap = kSupportCap) {
  return conjugate_site_projector(model, params, site, factor,
                                  ConjugationDirection::kModelSchrodinger, support_cap);
}

// --- shadow-estimated costs ---------------------------------------------------

/// Local cost estimated from Pauli shadows of the target's output states;
/// shadows[j] must have been collected on U|psi_j>. Re-evaluating at new
/// parameters reuses the same shadows: no further target access happens
/// here.
inline CostReport local_cost_from_shadows(const std::vector<ShadowSet>& shadows,
                                          const Circuit& model, const std::vector<double>& params,
                                          const std::vector<ProductState>& inputs,
                                          int batches = 10, int support_cap = kSupportCap) {
  if (shadows.empty() || shadows.size() != inputs.size())
    throw ValidationError("local_cost_from_shadows: need one shadow set per input state");
  const int n = model.n;
  double acc = 0.0;
  double var_acc = 0.0;
  for (std::size_t j = 0; j < shadows.size(); ++j) {
    if (shadows[j].kind != ShadowKind::kPauli)
      throw ValidationError("local_cost_from_shadows: shadows must be Pauli");
    if (shadows[j].n != n || inputs[j].n() != n)
      throw ValidationError("local_cost_from_shadows: size mismatch");
    for (int i = 0; i < n; ++i) {
      const SupportOperator obs = backpropagate_site_observable(
          model, params, i, inputs[j].factors[static_cast<std::size_t>(i)], support_cap);
      const Estimate est = estimate_support_expectation(shadows[j], obs, batches);
      acc += est.value;
      var_acc += est.stderr_ * est.stderr_;
    }
  }
  const double terms = static_cast<double>(shadows.size() * static_cast<std::size_t>(n));
  CostReport report;
  report.kind = "local";
  report.value = 1.0 - acc / terms;
  report.stderr_ = std::sqrt(var_acc) / terms;
  report.n_terms = static_cast<int>(terms);
  report.params_hash = params_hash(params);
  return report;
}

/// Global cost estimated from Clifford shadows; per state j the fidelity
/// with V(theta)|psi_j> is estimated from shadows[j].
inline CostReport global_cost_from_shadows(const std::vector<ShadowSet>& shadows,
                                           const Circuit& model, const std::vector<double>& params,
                                           const std::vector<StateVector>& inputs,
                                           int batches = 10) {
  if (shadows.empty() || shadows.size() != inputs.size())
    throw ValidationError("global_cost_from_shadows: need one shadow set per input state");
  double acc = 0.0;
  double var_acc = 0.0;
  for (std::size_t j = 0; j < shadows.size(); ++j) {
    if (shadows[j].kind != ShadowKind::kClifford)
      throw ValidationError("global_cost_from_shadows: shadows must be Clifford");
    const StateVector target_state = apply_circuit(inputs[j], model, params);
    const Estimate est = estimate_fidelity_clifford(shadows[j], target_state, batches);
    acc += est.value;
    var_acc += est.stderr_ * est.stderr_;
  }
  const double terms = static_cast<double>(shadows.size());
  CostReport report;
  report.kind = "global";
  report.value = 1.0 - acc / terms;
  report.stderr_ = std::sqrt(var_acc) / terms;
  report.n_terms = static_cast<int>(terms);
  report.params_hash = params_hash(params);
  return report;
}

/// Out-of-protocol diagnostic: global cost over fresh Haar product states.
inline double test_loss(const Circuit& target, const Circuit& model,
                        const std::vector<double>& params, int n_test, std::uint64_t seed) {
  if (n_test < 1) throw ValidationError("test_loss: need at least one test state");
  std::vector<StateVector> states;
  states.reserve(static_cast<std::size_t>(n_test));
  for (int t = 0; t < n_test; ++t)
    states.push_back(to_statevector(sample_haar_product(target.n, derive_seed(seed, static_cast<std::uint64_t>(t)))));
  return global_cost_exact(target, model, params, states);
}

}  // namespace qsl
