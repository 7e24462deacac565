// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qsl/circuit.hpp"
#include "qsl/clifford.hpp"
#include "qsl/common.hpp"
#include "qsl/pauli_algebra.hpp"
#include "qsl/state.hpp"

namespace qsl {

/// One random-Pauli-basis measurement: per-qubit basis in {X,Y,Z} and the
/// observed bit. Implicit snapshot operator: tensor of
/// (3 W_i^dag |b_i><b_i| W_i - I) = I/2 + (3/2)(-1)^{b_i} sigma_{basis_i}.
struct PauliSnapshot {
  std::string bases;  // chars 'X','Y','Z', one per qubit
  std::string bits;   // chars '0','1'

  bool operator==(const PauliSnapshot&) const = default;
};

/// One random-Clifford measurement: the sampled W as a tableau plus the
/// observed bitstring. Implicit snapshot: (2^n+1) W^dag |b><b| W - I.
struct CliffordSnapshot {
  CliffordTableau tableau;
  std::string bits;

  bool operator==(const CliffordSnapshot&) const = default;
};

enum class ShadowKind { kPauli, kClifford };

inline const char* shadow_kind_name(ShadowKind k) {
  return k == ShadowKind::kPauli ? "pauli" : "clifford";
}

struct ShadowMeta {
  ProductState input_state;  // empty factors when not applicable
  std::string target;        // structural description + hash, never parameters
  std::uint64_t seed = 0;

  bool operator==(const ShadowMeta& other) const {
    if (target != other.target || seed != other.seed) return false;
    if (input_state.labels != other.input_state.labels) return false;
    return input_state.factors == other.input_state.factors;
  }
};

struct ShadowSet {
  ShadowKind kind = ShadowKind::kPauli;
  int n = 0;
  ShadowMeta meta;
  std::vector<PauliSnapshot> pauli;
  std::vector<CliffordSnapshot> clifford;

  std::size_t shots() const {
    return kind == ShadowKind::kPauli ? pauli.size() : clifford.size();
  }

  bool operator==(const ShadowSet& other) const {
    return kind == other.kind && n == other.n && meta == other.meta &&
           pauli == other.pauli && clifford == other.clifford;
  }
};

/// Dense Hermitian operator on an explicit sorted subset of qubits.
struct SupportOperator {
  std::vector<int> support;
  MatrixX matrix;

  int k() const { return static_cast<int>(support.size()); }

  void validate(double tol = 1e-10) const {
    if (support.empty()) throw ValidationError("support operator: empty support");
    if (k() > kSupportCap)
      throw ResourceError("support operator: support size " + std::to_string(k()) +
                          " exceeds cap " + std::to_string(kSupportCap));
    if (!std::is_sorted(support.begin(), support.end()) ||
        std::adjacent_find(support.begin(), support.end()) != support.end())
      throw ValidationError("support operator: support must be sorted and distinct");
    const std::size_t dim = std::size_t{1} << k();
    if (static_cast<std::size_t>(matrix.rows()) != dim ||
        static_cast<std::size_t>(matrix.cols()) != dim)
      throw ValidationError("support operator: matrix size does not match support");
    if ((matrix - matrix.adjoint()).cwiseAbs().maxCoeff() > tol)
      throw ValidationError("support operator: matrix is not Hermitian");
  }
};

// --- sampling ---------------------------------------------------------------

namespace detail {

inline void rotate_to_basis(StateVector& state, char basis, int qubit) {
  static const Matrix2 h = hadamard_matrix();
  static const Matrix2 hsdg = (hadamard_matrix() * phase_s_matrix().adjoint()).eval();
  if (basis == 'X')
    apply_matrix_1q(state, h, qubit);
  else if (basis == 'Y')
    apply_matrix_1q(state, hsdg, qubit);
  else if (basis != 'Z')
    throw ValidationError("unknown measurement basis");
}

inline std::string bits_to_string(std::uint64_t index, int n) {
  std::string s(static_cast<std::size_t>(n), '0');
  for (int q = 0; q < n; ++q)
    if ((index >> q) & 1) s[static_cast<std::size_t>(q)] = '1';
  return s;
}

}  // namespace detail

/// M random-Pauli-basis measurements of `state`. Shot m draws its
/// randomness from (seed, m), so results are independent of evaluation
/// order and thread count.
inline ShadowSet sample_pauli_shadow(const StateVector& state, std::size_t shots,
                                     std::uint64_t seed, ShadowMeta meta = {}) {
  if (shots < 1) throw ValidationError("sample_pauli_shadow: need at least one shot");
  state.check_norm();
  ShadowSet set;
  set.kind = ShadowKind::kPauli;
  set.n = state.n;
  meta.seed = seed;
  set.meta = std::move(meta);
  set.pauli.resize(shots);
  parallel_for(shots, [&](std::size_t m) {
    Rng rng = make_rng(seed, m);
    std::uniform_int_distribution<int> pick(0, 2);
    std::string bases(static_cast<std::size_t>(state.n), 'Z');
    StateVector rotated = state;
    for (int q = 0; q < state.n; ++q) {
      bases[static_cast<std::size_t>(q)] = "XYZ"[pick(rng)];
      detail::rotate_to_basis(rotated, bases[static_cast<std::size_t>(q)], q);
    }
    const std::uint64_t outcome = born_sample(rotated, rng);
    set.pauli[m] = PauliSnapshot{std::move(bases), detail::bits_to_string(outcome, state.n)};
  });
  return set;
}

/// M uniform-random-Clifford measurements of `state`.
inline ShadowSet sample_clifford_shadow(const StateVector& state, std::size_t shots,
                                        std::uint64_t seed, ShadowMeta meta = {}) {
  if (shots < 1) throw ValidationError("sample_clifford_shadow: need at least one shot");
  if (state.n > kCliffordCap)
    throw ResourceError("sample_clifford_shadow: n exceeds Clifford cap " +
                        std::to_string(kCliffordCap));
  state.check_norm();
  ShadowSet set;
  set.kind = ShadowKind::kClifford;
  set.n = state.n;
  meta.seed = seed;
  set.meta = std::move(meta);
  set.clifford.resize(shots);
  parallel_for(shots, [&](std::size_t m) {
    Rng rng = make_rng(seed, m);
    const auto gates = sample_clifford_gates(state.n, rng);
    StateVector rotated = apply_clifford(state, gates);
    const std::uint64_t outcome = born_sample(rotated, rng);
    set.clifford[m] = CliffordSnapshot{CliffordTableau::from_gates(state.n, gates),
                                       detail::bits_to_string(outcome, state.n)};
  });
  return set;
}

// --- estimation -------------------------------------------------------------

struct Estimate {
  double value = 0.0;
  double stderr_ = 0.0;
};

/// Median of K contiguous batch means; stderr is the batch-mean spread
/// scaled by 1/sqrt(K). Depends only on (values, batches).
inline Estimate median_of_means(const std::vector<double>& values, int batches) {
  if (values.empty()) throw ValidationError("median_of_means: no values");
  if (batches < 1) throw ValidationError("median_of_means: need at least one batch");
  if (static_cast<std::size_t>(batches) > values.size())
    throw ValidationError("median_of_means: more batches than samples");
  const std::size_t m = values.size();
  std::vector<double> means(static_cast<std::size_t>(batches), 0.0);
  for (int b = 0; b < batches; ++b) {
    const std::size_t lo = m * static_cast<std::size_t>(b) / static_cast<std::size_t>(batches);
    const std::size_t hi = m * static_cast<std::size_t>(b + 1) / static_cast<std::size_t>(batches);
    double s = 0.0;
    for (std::size_t i = lo; i < hi; ++i) s += values[i];
    means[static_cast<std::size_t>(b)] = s / static_cast<double>(hi - lo);
  }
  std::vector<double> sorted = means;
  std::sort(sorted.begin(), sorted.end());
  double median;
  if (batches % 2 == 1)
    median = sorted[static_cast<std::size_t>(batches / 2)];
  else
    median = 0.5 * (sorted[static_cast<std::size_t>(batches / 2 - 1)] +
                    sorted[static_cast<std::size_t>(batches / 2)]);
  double mean = 0.0;
  for (double v : means) mean += v;
  mean /= static_cast<double>(batches);
  double var = 0.0;
  for (double v : means) var += (v - mean) * (v - mean);
  var = batches > 1 ? var / static_cast<double>(batches - 1) : 0.0;
  Estimate e;
  e.value = median;
  e.stderr_ = std::sqrt(var / static_cast<double>(batches));
  return e;
}

/// Per-snapshot values of Tr[snapshot * obs] for a Pauli shadow. Factors
/// outside the support trace out to exactly 1, so only support qubits are
/// contracted: the snapshot factor is I/2 + (3/2) s_i sigma_{B_i}, hence
/// value = sum over subsets T of the support of
///         (1/2^k) prod_{i in T} 3 s_i * Tr[P(T) obs],
/// with P(T) carrying basis_i on T and I elsewhere.
inline std::vector<double> pauli_snapshot_values(const ShadowSet& shadow,
                                                 const SupportOperator& obs) {
  if (shadow.kind != ShadowKind::kPauli)
    throw ValidationError("pauli_snapshot_values: shadow kind must be pauli");
  obs.validate();
  for (int q : obs.support)
    if (q < 0 || q >= shadow.n)
      throw ValidationError("pauli_snapshot_values: support outside shadow register");
  const int k = obs.k();
  const auto coeffs = pauli_coefficients(obs.matrix, k);  // c_P = Tr[P obs]/2^k
  // Tr[P obs] = 2^k c_P, and the 1/2^k prefactor cancels it.
  std::vector<double> traces(coeffs.size());
  for (std::size_t i = 0; i < coeffs.size(); ++i) traces[i] = coeffs[i].real();

  std::vector<double> values(shadow.pauli.size(), 0.0);
  parallel_for(shadow.pauli.size(), [&](std::size_t m) {
    const auto& snap = shadow.pauli[m];
    // per-support-qubit Pauli digit and sign
    std::uint64_t digits[kSupportCap];
    double signs[kSupportCap];
    for (int i = 0; i < k; ++i) {
      const int q = obs.support[static_cast<std::size_t>(i)];
      const char b = snap.bases[static_cast<std::size_t>(q)];
      digits[i] = static_cast<std::uint64_t>(b == 'X' ? 1 : (b == 'Y' ? 2 : 3)) << (2 * i);
      signs[i] = snap.bits[static_cast<std::size_t>(q)] == '0' ? 1.0 : -1.0;
    }
    double total = 0.0;
    const std::uint64_t subsets = std::uint64_t{1} << k;
    for (std::uint64_t t = 0; t < subsets; ++t) {
      std::uint64_t code = 0;
      double factor = 1.0;
      for (int i = 0; i < k; ++i)
        if ((t >> i) & 1) {
          code |= digits[i];
          factor *= 3.0 * signs[i];
        }
      total += factor * traces[code];
    }
    values[m] = total;
  });
  return values;
}

/// Median-of-means estimate of Tr[rho * obs] from a Pauli shadow of rho.
inline Estimate estimate_support_expectation(const ShadowSet& shadow,
                                             const SupportOperator& obs, int batches = 10) {
  const auto values = pauli_snapshot_values(shadow, obs);
  return median_of_means(values, batches);
}

/// Per-snapshot values (2^n+1)|<b|W|target>|^2 - 1 for a Clifford shadow;
/// their mean estimates |<target|rho|target>|. W is resynthesized from the
/// stored tableau, so estimates depend only on the snapshot data.
inline std::vector<double> clifford_snapshot_values(const ShadowSet& shadow,
                                                    const StateVector& target) {
  if (shadow.kind != ShadowKind::kClifford)
    throw ValidationError("clifford_snapshot_values: shadow kind must be clifford");
  if (target.n != shadow.n)
    throw ValidationError("clifford_snapshot_values: qubit counts differ");
  target.check_norm();
  const double dplus1 = static_cast<double>(std::uint64_t{1} << shadow.n) + 1.0;
  std::vector<double> values(shadow.clifford.size(), 0.0);
  parallel_for(shadow.clifford.size(), [&](std::size_t m) {
    const auto& snap = shadow.clifford[m];
    const auto gates = snap.tableau.to_gates();
    StateVector rotated = apply_clifford(target, gates);
    std::uint64_t index = 0;
    for (int q = 0; q < shadow.n; ++q)
      if (snap.bits[static_cast<std::size_t>(q)] == '1') index |= std::uint64_t{1} << q;
    values[m] = dplus1 * std::norm(rotated.amps[index]) - 1.0;
  });
  return values;
}

/// Median-of-means fidelity estimate <target|rho|target> from a Clifford
/// shadow of rho.
inline Estimate estimate_fidelity_clifford(const ShadowSet& shadow, const StateVector& target,
                                           int batches = 10) {
  const auto values = clifford_snapshot_values(shadow, target);
  return median_of_means(values, batches);
}

}  // namespace qsl
