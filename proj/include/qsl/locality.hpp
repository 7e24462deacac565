// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "qsl/common.hpp"
#include "qsl/costs.hpp"
#include "qsl/pauli_algebra.hpp"
#include "qsl/shadows.hpp"

namespace qsl {

/// Pauli expansion of a support operator: coeffs[code] holds the real
/// coefficient of the base-4-coded Pauli string on `support`. Weight
/// counts non-identity factors; identity padding outside the support
/// contributes nothing.
struct PauliDecomposition {
  std::vector<int> support;
  std::vector<double> coeffs;

  int k() const { return static_cast<int>(support.size()); }

  double coeff(const std::string& pauli) const {
    if (static_cast<int>(pauli.size()) != k())
      throw ValidationError("PauliDecomposition: string length != support size");
    return coeffs[pauli_string_to_code(pauli)];
  }

  std::map<std::string, double> term_map(double drop_below = 0.0) const {
    std::map<std::string, double> terms;
    for (std::size_t code = 0; code < coeffs.size(); ++code)
      if (std::abs(coeffs[code]) > drop_below)
        terms[pauli_code_to_string(code, k())] = coeffs[code];
    return terms;
  }
};

inline PauliDecomposition pauli_decompose(const SupportOperator& op) {
  op.validate();
  const auto raw = pauli_coefficients(op.matrix, op.k());
  PauliDecomposition d;
  d.support = op.support;
  d.coeffs.resize(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    if (std::abs(raw[i].imag()) > 1e-10)
      throw NumericError("pauli_decompose: complex coefficient from a Hermitian operator");
    d.coeffs[i] = raw[i].real();
  }
  return d;
}

inline MatrixX reconstruct(const PauliDecomposition& d) {
  std::vector<cplx> coeffs(d.coeffs.size());
  for (std::size_t i = 0; i < d.coeffs.size(); ++i) coeffs[i] = d.coeffs[i];
  return pauli_reconstruct(coeffs, d.k());
}

/// The weight > k part of the expansion, as a dense matrix on the support.
inline MatrixX tail_matrix(const PauliDecomposition& d, int k) {
  std::vector<cplx> coeffs(d.coeffs.size(), cplx(0.0, 0.0));
  for (std::size_t code = 0; code < d.coeffs.size(); ++code)
    if (pauli_weight(code, d.k()) > k) coeffs[code] = d.coeffs[code];
  return pauli_reconstruct(coeffs, d.k());
}

/// The weight <= k truncation of the operator.
inline MatrixX truncated_matrix(const PauliDecomposition& d, int k) {
  std::vector<cplx> coeffs(d.coeffs.size(), cplx(0.0, 0.0));
  for (std::size_t code = 0; code < d.coeffs.size(); ++code)
    if (pauli_weight(code, d.k()) <= k) coeffs[code] = d.coeffs[code];
  return pauli_reconstruct(coeffs, d.k());
}

/// alpha(k): spectral norm of the weight > k tail.
inline double tail_norm(const PauliDecomposition& d, int k) {
  if (k < 0 || k > d.k()) throw ValidationError("tail_norm: cutoff out of range");
  if (k == d.k()) return 0.0;
  return spectral_norm_hermitian(tail_matrix(d, k));
}

struct LocalityProfile {
  struct Entry {
    int k = 0;
    double alpha = 0.0;
  };
  std::vector<Entry> entries;
  // context
  int n = 0;
  int site = 0;
  int support_size = 0;

  /// Smallest cutoff whose tail vanishes (within tol).
  int standard_locality(double tol = 1e-10) const {
    for (const auto& e : entries)
      if (e.alpha <= tol) return e.k;
    return support_size;
  }
};

/// alpha(k) over the requested cutoffs for the conjugated single-site
/// projector. Direction selects V^dag O V (Heisenberg picture of the
/// measurement) or V O V^dag (the absorbed training observable).
inline LocalityProfile locality_profile(const Circuit& model, const std::vector<double>& params,
                                        int site, const std::array<cplx, 2>& factor,
                                        const std::vector<int>& cutoffs,
                                        ConjugationDirection direction =
                                            ConjugationDirection::kModelHeisenberg) {
  const SupportOperator op =
      conjugate_site_projector(model, params, site, factor, direction, /*support_cap=*/10);
  const PauliDecomposition d = pauli_decompose(op);
  LocalityProfile profile;
  profile.n = model.n;
  profile.site = site;
  profile.support_size = d.k();
  std::vector<double> alphas(cutoffs.size(), 0.0);
  parallel_for(cutoffs.size(), [&](std::size_t i) {
    const int k = cutoffs[i];
    alphas[i] = k >= d.k() ? 0.0 : tail_norm(d, k);
  });
  for (std::size_t i = 0; i < cutoffs.size(); ++i)
    profile.entries.push_back({cutoffs[i], alphas[i]});
  return profile;
}

}  // namespace qsl
