// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "qsl/common.hpp"

namespace qsl {

/// Dense n-qubit state. Qubit 0 is the least-significant bit of the
/// amplitude index throughout the library.
struct StateVector {
  int n = 0;
  std::vector<cplx> amps;

  StateVector() = default;

  /// Computational basis state |index> on n qubits.
  explicit StateVector(int n_qubits, std::uint64_t index = 0) : n(n_qubits) {
    if (n < 1) throw ValidationError("StateVector: need at least one qubit");
    if (n > kMaxQubits)
      throw ResourceError("StateVector: " + std::to_string(n) +
                          " qubits exceeds cap " + std::to_string(kMaxQubits));
    amps.assign(std::size_t{1} << n, cplx(0.0, 0.0));
    amps[index] = cplx(1.0, 0.0);
  }

  std::size_t dim() const { return amps.size(); }

  double norm_sq() const {
    double s = 0.0;
    for (const auto& a : amps) s += std::norm(a);
    return s;
  }

  void check_norm(double tol = kNormTol) const {
    double s = norm_sq();
    if (std::abs(s - 1.0) > tol)
      throw NumericError("state norm drifted: |psi|^2 = " + std::to_string(s));
  }
};

/// <a|b>.
inline cplx overlap(const StateVector& a, const StateVector& b) {
  if (a.n != b.n) throw ValidationError("overlap: qubit counts differ");
  cplx s(0.0, 0.0);
  for (std::size_t i = 0; i < a.dim(); ++i) s += std::conj(a.amps[i]) * b.amps[i];
  return s;
}

inline double fidelity(const StateVector& a, const StateVector& b) {
  return std::norm(overlap(a, b));
}

// Single-qubit stabilizer states, in the fixed order used for labels,
// uniform sampling and file headers.
enum StabLabel : int { kZero = 0, kOne, kPlus, kMinus, kPlusI, kMinusI };

inline constexpr int kNumStabLabels = 6;

inline std::array<cplx, 2> stab_amps(int label) {
  const double r = 1.0 / std::sqrt(2.0);
  switch (label) {
    case kZero:   return {cplx(1, 0), cplx(0, 0)};
    case kOne:    return {cplx(0, 0), cplx(1, 0)};
    case kPlus:   return {cplx(r, 0), cplx(r, 0)};
    case kMinus:  return {cplx(r, 0), cplx(-r, 0)};
    case kPlusI:  return {cplx(r, 0), cplx(0, r)};
    case kMinusI: return {cplx(r, 0), cplx(0, -r)};
    default: throw ValidationError("unknown stabilizer label code");
  }
}

inline const char* stab_label_name(int label) {
  static const char* names[kNumStabLabels] = {"0", "1", "+", "-", "i", "-i"};
  if (label < 0 || label >= kNumStabLabels)
    throw ValidationError("unknown stabilizer label code");
  return names[label];
}

inline int parse_stab_label(const std::string& s) {
  for (int l = 0; l < kNumStabLabels; ++l)
    if (s == stab_label_name(l)) return l;
  throw ValidationError("unknown stabilizer label '" + s + "'");
}

/// Tensor product of single-qubit factors. `labels[i]` is the stabilizer
/// tag of factor i, or -1 when the factor is a generic state.
struct ProductState {
  std::vector<std::array<cplx, 2>> factors;
  std::vector<int> labels;

  int n() const { return static_cast<int>(factors.size()); }

  bool all_labeled() const {
    if (labels.size() != factors.size()) return false;
    for (int l : labels)
      if (l < 0) return false;
    return true;
  }
};

inline void validate_factor(const std::array<cplx, 2>& f, double tol = 1e-9) {
  double s = std::norm(f[0]) + std::norm(f[1]);
  if (std::abs(s - 1.0) > tol)
    throw ValidationError("single-qubit factor is not normalized");
}

inline ProductState product_state_from_labels(const std::vector<std::string>& labels) {
  ProductState ps;
  ps.factors.reserve(labels.size());
  ps.labels.reserve(labels.size());
  for (const auto& s : labels) {
    int l = parse_stab_label(s);
    ps.factors.push_back(stab_amps(l));
    ps.labels.push_back(l);
  }
  return ps;
}

inline ProductState product_state_from_amps(const std::vector<std::array<cplx, 2>>& factors) {
  ProductState ps;
  for (const auto& f : factors) {
    validate_factor(f);
    ps.factors.push_back(f);
    ps.labels.push_back(-1);
  }
  return ps;
}

inline StateVector to_statevector(const ProductState& ps) {
  if (ps.n() < 1) throw ValidationError("product state needs at least one factor");
  StateVector sv(ps.n());
  // amps[x] = prod_i factor_i[bit_i(x)], qubit 0 = LSB.
  for (std::size_t x = 0; x < sv.dim(); ++x) {
    cplx a(1.0, 0.0);
    for (int q = 0; q < ps.n(); ++q) a *= ps.factors[q][(x >> q) & 1];
    sv.amps[x] = a;
  }
  return sv;
}

inline StateVector make_product_state(const std::vector<std::string>& labels) {
  return to_statevector(product_state_from_labels(labels));
}

inline StateVector make_product_state(std::initializer_list<const char*> labels) {
  return make_product_state(std::vector<std::string>(labels.begin(), labels.end()));
}

inline StateVector make_product_state(const std::vector<std::array<cplx, 2>>& factors) {
  return to_statevector(product_state_from_amps(factors));
}

/// Each factor uniform over the six single-qubit stabilizer states,
/// independent across qubits. Deterministic in seed.
inline ProductState sample_stabilizer_product(int n, std::uint64_t seed) {
  if (n < 1) throw ValidationError("sample_stabilizer_product: n >= 1 required");
  Rng rng = make_rng(seed);
  std::uniform_int_distribution<int> pick(0, kNumStabLabels - 1);
  ProductState ps;
  ps.factors.reserve(n);
  for (int q = 0; q < n; ++q) {
    int l = pick(rng);
    ps.factors.push_back(stab_amps(l));
    ps.labels.push_back(l);
  }
  return ps;
}

/// Each factor Haar random: two standard complex Gaussians, normalized.
inline ProductState sample_haar_product(int n, std::uint64_t seed) {
  if (n < 1) throw ValidationError("sample_haar_product: n >= 1 required");
  Rng rng = make_rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  ProductState ps;
  ps.factors.reserve(n);
  for (int q = 0; q < n; ++q) {
    cplx a(gauss(rng), gauss(rng));
    cplx b(gauss(rng), gauss(rng));
    double r = std::sqrt(std::norm(a) + std::norm(b));
    ps.factors.push_back({a / r, b / r});
    ps.labels.push_back(-1);
  }
  return ps;
}

/// One Born-rule draw from |amps|^2; returns the sampled basis index.
inline std::uint64_t born_sample(const StateVector& state, Rng& rng) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  double u = unif(rng);
  double acc = 0.0;
  std::size_t last = state.dim() - 1;
  for (std::size_t i = 0; i < state.dim(); ++i) {
    acc += std::norm(state.amps[i]);
    if (u < acc) return i;
  }
  return last;  // rounding slack lands on the top index
}

}  // namespace qsl
