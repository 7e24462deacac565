// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>
#include <bit>
#include <cstdint>
#include <string>
#include <vector>

#include "qsl/circuit.hpp"
#include "qsl/common.hpp"

namespace qsl {

// Pauli strings over k qubits are coded base-4, digit q = qubit q:
// 0 = I, 1 = X, 2 = Y, 3 = Z.

inline constexpr char kPauliChars[4] = {'I', 'X', 'Y', 'Z'};

inline int pauli_weight(std::uint64_t code, int k) {
  int w = 0;
  for (int q = 0; q < k; ++q)
    if ((code >> (2 * q)) & 3) ++w;
  return w;
}

inline std::string pauli_code_to_string(std::uint64_t code, int k) {
  std::string s(static_cast<std::size_t>(k), 'I');
  for (int q = 0; q < k; ++q) s[static_cast<std::size_t>(q)] = kPauliChars[(code >> (2 * q)) & 3];
  return s;
}

inline std::uint64_t pauli_string_to_code(const std::string& s) {
  std::uint64_t code = 0;
  for (std::size_t q = 0; q < s.size(); ++q) {
    int d = -1;
    for (int p = 0; p < 4; ++p)
      if (s[q] == kPauliChars[p]) d = p;
    if (d < 0) throw ValidationError("bad Pauli character in '" + s + "'");
    code |= static_cast<std::uint64_t>(d) << (2 * q);
  }
  return code;
}

inline MatrixX pauli_string_matrix(const std::string& s) {
  MatrixX m = MatrixX::Ones(1, 1);
  for (std::size_t q = 0; q < s.size(); ++q) {
    // qubit q is the low bit, so each new factor goes on the high side
    const Matrix2 f = pauli_matrix_1q(s[q]);
    MatrixX next(m.rows() * 2, m.cols() * 2);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        next.block(i * m.rows(), j * m.cols(), m.rows(), m.cols()) = f(i, j) * m;
    m.swap(next);
  }
  return m;
}

/// Coefficients c_P = Tr[P M] / 2^k for all 4^k Pauli strings, indexed by
/// code. Runs in O(k 4^k) via a per-qubit butterfly.
inline std::vector<cplx> pauli_coefficients(const MatrixX& m, int k) {
  if (k < 0 || k > kSupportCap) throw ResourceError("pauli_coefficients: support too large");
  const std::size_t dim = std::size_t{1} << k;
  if (static_cast<std::size_t>(m.rows()) != dim || static_cast<std::size_t>(m.cols()) != dim)
    throw ValidationError("pauli_coefficients: matrix does not match qubit count");
  std::vector<cplx> t(dim * dim);
  // interleave: index = sum_q (row_bit + 2 col_bit) 4^q
  for (std::size_t r = 0; r < dim; ++r)
    for (std::size_t c = 0; c < dim; ++c) {
      std::size_t idx = 0;
      for (int q = 0; q < k; ++q)
        idx |= (((r >> q) & 1) | (((c >> q) & 1) << 1)) << (2 * q);
      t[idx] = m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
    }
  const cplx im(0.0, 1.0);
  for (int q = 0; q < k; ++q) {
    const std::size_t stride = std::size_t{1} << (2 * q);
    for (std::size_t base = 0; base < t.size(); base += stride * 4) {
      for (std::size_t off = 0; off < stride; ++off) {
        const std::size_t i0 = base + off;
        const cplx v00 = t[i0];                // row 0, col 0
        const cplx v10 = t[i0 + stride];       // row 1, col 0
        const cplx v01 = t[i0 + 2 * stride];   // row 0, col 1
        const cplx v11 = t[i0 + 3 * stride];
        t[i0] = 0.5 * (v00 + v11);             // I
        t[i0 + stride] = 0.5 * (v01 + v10);    // X
        t[i0 + 2 * stride] = 0.5 * im * (v01 - v10);  // Y
        t[i0 + 3 * stride] = 0.5 * (v00 - v11);       // Z
      }
    }
  }
  return t;
}

/// Inverse of pauli_coefficients: M = sum_P c_P P.
inline MatrixX pauli_reconstruct(const std::vector<cplx>& coeffs, int k) {
  const std::size_t dim = std::size_t{1} << k;
  if (coeffs.size() != dim * dim)
    throw ValidationError("pauli_reconstruct: coefficient count mismatch");
  std::vector<cplx> t = coeffs;
  const cplx im(0.0, 1.0);
  for (int q = 0; q < k; ++q) {
    const std::size_t stride = std::size_t{1} << (2 * q);
    for (std::size_t base = 0; base < t.size(); base += stride * 4) {
      for (std::size_t off = 0; off < stride; ++off) {
        const std::size_t i0 = base + off;
        const cplx ci = t[i0];
        const cplx cx = t[i0 + stride];
        const cplx cy = t[i0 + 2 * stride];
        const cplx cz = t[i0 + 3 * stride];
        t[i0] = ci + cz;                  // row 0, col 0
        t[i0 + stride] = cx + im * cy;    // row 1, col 0
        t[i0 + 2 * stride] = cx - im * cy;  // row 0, col 1
        t[i0 + 3 * stride] = ci - cz;
      }
    }
  }
  MatrixX m(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  for (std::size_t r = 0; r < dim; ++r)
    for (std::size_t c = 0; c < dim; ++c) {
      std::size_t idx = 0;
      for (int q = 0; q < k; ++q)
        idx |= (((r >> q) & 1) | (((c >> q) & 1) << 1)) << (2 * q);
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = t[idx];
    }
  return m;
}

/// Largest singular value of a Hermitian matrix (largest |eigenvalue|).
inline double spectral_norm_hermitian(const MatrixX& m) {
  if (m.rows() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<MatrixX> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

}  // namespace qsl
