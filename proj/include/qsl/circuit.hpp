// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "qsl/common.hpp"
#include "qsl/state.hpp"

namespace qsl {

using Matrix2 = Eigen::Matrix2cd;
using Matrix4 = Eigen::Matrix4cd;
using MatrixX = Eigen::MatrixXcd;

/// One- or two-qubit gate. A gate either carries a fixed unitary, or a
/// parameter binding (index j, Hermitian generator G) with the bound value
/// exp(-i theta_j G / 2).
struct Gate {
  int arity = 1;                    // 1 or 2
  std::array<int, 2> targets{0, 0}; // targets[1] unused for arity 1
  std::array<cplx, 16> matrix{};    // row-major, 2x2 or 4x4
  bool parametric = false;
  int param_index = -1;
  std::array<cplx, 16> generator{}; // Hermitian, same layout as matrix
  bool involutory = false;          // G^2 = I, enables the closed-form exp
  std::string name;

  int dim() const { return arity == 1 ? 2 : 4; }
};

namespace detail {

inline void copy_matrix(const MatrixX& m, std::array<cplx, 16>& out) {
  const int d = static_cast<int>(m.rows());
  for (int r = 0; r < d; ++r)
    for (int c = 0; c < d; ++c) out[static_cast<std::size_t>(r * d + c)] = m(r, c);
}

inline MatrixX to_eigen(const std::array<cplx, 16>& m, int d) {
  MatrixX out(d, d);
  for (int r = 0; r < d; ++r)
    for (int c = 0; c < d; ++c) out(r, c) = m[static_cast<std::size_t>(r * d + c)];
  return out;
}

inline bool is_involutory(const MatrixX& g) {
  return (g * g - MatrixX::Identity(g.rows(), g.cols())).cwiseAbs().maxCoeff() < 1e-12;
}

}  // namespace detail

/// Bound unitary for a parametric gate: exp(-i theta G / 2). Involutory
/// generators use cos/sin directly; the rest go through an eigendecomposition.
inline MatrixX gate_matrix(const Gate& g, const std::vector<double>& params) {
  const int d = g.dim();
  if (!g.parametric) return detail::to_eigen(g.matrix, d);
  if (g.param_index < 0 || g.param_index >= static_cast<int>(params.size()))
    throw ValidationError("gate parameter index out of range");
  const double theta = params[static_cast<std::size_t>(g.param_index)];
  MatrixX gen = detail::to_eigen(g.generator, d);
  if (g.involutory) {
    return std::cos(theta / 2.0) * MatrixX::Identity(d, d) -
           cplx(0.0, 1.0) * std::sin(theta / 2.0) * gen;
  }
  Eigen::SelfAdjointEigenSolver<MatrixX> es(gen);
  MatrixX phases = MatrixX::Zero(d, d);
  for (int i = 0; i < d; ++i)
    phases(i, i) = std::exp(cplx(0.0, -es.eigenvalues()(i) * theta / 2.0));
  return es.eigenvectors() * phases * es.eigenvectors().adjoint();
}

/// Ordered gate list over n qubits. `default_params` holds the parameter
/// assignment that reproduces the construction target (e.g. the Trotter
/// angles the builder was called with); unparameterized circuits keep it
/// empty.
struct Circuit {
  int n = 0;
  std::vector<Gate> gates;
  int num_params = 0;
  std::vector<double> default_params;
  std::string description;

  void validate() const {
    if (n < 1) throw ValidationError("circuit: need at least one qubit");
    std::vector<bool> seen(static_cast<std::size_t>(num_params), false);
    for (const auto& g : gates) {
      for (int k = 0; k < g.arity; ++k)
        if (g.targets[static_cast<std::size_t>(k)] < 0 || g.targets[static_cast<std::size_t>(k)] >= n)
          throw ValidationError("circuit: gate target out of range");
      if (g.arity == 2 && g.targets[0] == g.targets[1])
        throw ValidationError("circuit: two-qubit gate with equal targets");
      if (g.parametric) {
        if (g.param_index < 0 || g.param_index >= num_params)
          throw ValidationError("circuit: parameter index out of range");
        seen[static_cast<std::size_t>(g.param_index)] = true;
      }
    }
    for (int j = 0; j < num_params; ++j)
      if (!seen[static_cast<std::size_t>(j)])
        throw ValidationError("circuit: parameter indices not contiguous");
  }
};

// --- gate constructors ----------------------------------------------------

inline Gate fixed_gate_1q(const Matrix2& m, int target, std::string name = "") {
  Gate g;
  g.arity = 1;
  g.targets = {target, 0};
  detail::copy_matrix(m, g.matrix);
  g.name = std::move(name);
  return g;
}

inline Gate fixed_gate_2q(const Matrix4& m, int t0, int t1, std::string name = "") {
  Gate g;
  g.arity = 2;
  g.targets = {t0, t1};
  detail::copy_matrix(m, g.matrix);
  g.name = std::move(name);
  return g;
}

/// kron(a, b): a acts on the high bit, b on the low bit of the 2-bit index.
inline Matrix4 kron2(const Matrix2& a, const Matrix2& b) {
  Matrix4 out;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) out.block<2, 2>(2 * i, 2 * j) = a(i, j) * b;
  return out;
}

inline Matrix2 pauli_matrix_1q(char p) {
  Matrix2 m;
  switch (p) {
    case 'I': m << 1, 0, 0, 1; break;
    case 'X': m << 0, 1, 1, 0; break;
    case 'Y': m << 0, cplx(0, -1), cplx(0, 1), 0; break;
    case 'Z': m << 1, 0, 0, -1; break;
    default: throw ValidationError(std::string("unknown Pauli '") + p + "'");
  }
  return m;
}

inline Matrix2 hadamard_matrix() {
  Matrix2 m;
  const double r = 1.0 / std::sqrt(2.0);
  m << r, r, r, -r;
  return m;
}

inline Matrix2 phase_s_matrix() {
  Matrix2 m;
  m << 1, 0, 0, cplx(0, 1);
  return m;
}

inline Gate gate_x(int t) { return fixed_gate_1q(pauli_matrix_1q('X'), t, "x"); }
inline Gate gate_y(int t) { return fixed_gate_1q(pauli_matrix_1q('Y'), t, "y"); }
inline Gate gate_z(int t) { return fixed_gate_1q(pauli_matrix_1q('Z'), t, "z"); }
inline Gate gate_h(int t) { return fixed_gate_1q(hadamard_matrix(), t, "h"); }
inline Gate gate_s(int t) { return fixed_gate_1q(phase_s_matrix(), t, "s"); }
inline Gate gate_sdg(int t) { return fixed_gate_1q(phase_s_matrix().adjoint(), t, "sdg"); }

inline Gate gate_cnot(int control, int target) {
  Matrix4 m = Matrix4::Zero();
  // Qubit order inside the gate matrix follows targets = {control, target}:
  // bit 0 of the 2-bit gate index is targets[0].
  // |c,t> -> |c, t^c>: index = c + 2t.
  m(0, 0) = 1;  // 00 -> 00
  m(3, 1) = 1;  // c=1,t=0 -> c=1,t=1
  m(2, 2) = 1;  // c=0,t=1 fixed
  m(1, 3) = 1;  // c=1,t=1 -> c=1,t=0
  return fixed_gate_2q(m, control, target, "cnot");
}

/// Rotation exp(-i theta P / 2) for a one- or two-qubit Pauli string
/// ("X", "ZZ", "XY", ...). If param_index >= 0 the gate is trainable and
/// theta is its default value.
inline Gate gate_pauli_rotation(const std::string& paulis, const std::vector<int>& targets,
                                double theta, int param_index = -1) {
  if (paulis.size() != targets.size() || paulis.empty() || paulis.size() > 2)
    throw ValidationError("gate_pauli_rotation: need 1 or 2 Pauli factors");
  MatrixX gen = pauli_matrix_1q(paulis[0]);
  if (paulis.size() == 2) {
    // bit 0 of the gate index is targets[0], so the second factor sits on
    // the high bit.
    gen = kron2(pauli_matrix_1q(paulis[1]), pauli_matrix_1q(paulis[0]));
  }
  Gate g;
  g.arity = static_cast<int>(paulis.size());
  g.targets = {targets[0], g.arity == 2 ? targets[1] : 0};
  g.name = "r" + paulis;
  detail::copy_matrix(gen, g.generator);
  g.involutory = true;
  g.parametric = param_index >= 0;
  g.param_index = param_index;
  const int d = g.dim();
  MatrixX bound = std::cos(theta / 2.0) * MatrixX::Identity(d, d) -
                  cplx(0.0, 1.0) * std::sin(theta / 2.0) * gen;
  detail::copy_matrix(bound, g.matrix);
  return g;
}

inline Gate gate_rx(int t, double theta, int param_index = -1) {
  return gate_pauli_rotation("X", {t}, theta, param_index);
}
inline Gate gate_ry(int t, double theta, int param_index = -1) {
  return gate_pauli_rotation("Y", {t}, theta, param_index);
}
inline Gate gate_rz(int t, double theta, int param_index = -1) {
  return gate_pauli_rotation("Z", {t}, theta, param_index);
}

// --- application ----------------------------------------------------------

inline void apply_matrix_1q(StateVector& state, const MatrixX& m, int target) {
  const std::uint64_t bit = std::uint64_t{1} << target;
  const std::uint64_t dim = state.dim();
  const cplx m00 = m(0, 0), m01 = m(0, 1), m10 = m(1, 0), m11 = m(1, 1);
  for (std::uint64_t i = 0; i < dim; ++i) {
    if (i & bit) continue;
    const cplx a0 = state.amps[i];
    const cplx a1 = state.amps[i | bit];
    state.amps[i] = m00 * a0 + m01 * a1;
    state.amps[i | bit] = m10 * a0 + m11 * a1;
  }
}

inline void apply_matrix_2q(StateVector& state, const MatrixX& m, int t0, int t1) {
  const std::uint64_t b0 = std::uint64_t{1} << t0;
  const std::uint64_t b1 = std::uint64_t{1} << t1;
  const std::uint64_t dim = state.dim();
  for (std::uint64_t i = 0; i < dim; ++i) {
    if (i & (b0 | b1)) continue;
    std::array<cplx, 4> a{state.amps[i], state.amps[i | b0], state.amps[i | b1],
                          state.amps[i | b0 | b1]};
    for (int r = 0; r < 4; ++r) {
      cplx v = m(r, 0) * a[0] + m(r, 1) * a[1] + m(r, 2) * a[2] + m(r, 3) * a[3];
      std::uint64_t idx = i | ((r & 1) ? b0 : 0) | ((r & 2) ? b1 : 0);
      state.amps[idx] = v;
    }
  }
}

inline void apply_gate(StateVector& state, const Gate& g, const std::vector<double>& params) {
  MatrixX m = gate_matrix(g, params);
  if (g.arity == 1)
    apply_matrix_1q(state, m, g.targets[0]);
  else
    apply_matrix_2q(state, m, g.targets[0], g.targets[1]);
}

inline StateVector apply_circuit(const StateVector& state, const Circuit& circuit,
                                 const std::vector<double>& params) {
  if (state.n != circuit.n) throw ValidationError("apply_circuit: qubit counts differ");
  if (static_cast<int>(params.size()) != circuit.num_params)
    throw ValidationError("apply_circuit: expected " + std::to_string(circuit.num_params) +
                          " parameters, got " + std::to_string(params.size()));
  StateVector out = state;
  for (const auto& g : circuit.gates) apply_gate(out, g, params);
  out.check_norm();
  return out;
}

inline StateVector apply_circuit(const StateVector& state, const Circuit& circuit) {
  return apply_circuit(state, circuit, circuit.default_params);
}

/// Applies the adjoint circuit: gates reversed, each matrix conjugated.
inline StateVector apply_circuit_adjoint(const StateVector& state, const Circuit& circuit,
                                         const std::vector<double>& params) {
  if (state.n != circuit.n) throw ValidationError("apply_circuit_adjoint: qubit counts differ");
  if (static_cast<int>(params.size()) != circuit.num_params)
    throw ValidationError("apply_circuit_adjoint: parameter count mismatch");
  StateVector out = state;
  for (auto it = circuit.gates.rbegin(); it != circuit.gates.rend(); ++it) {
    MatrixX m = gate_matrix(*it, params).adjoint();
    if (it->arity == 1)
      apply_matrix_1q(out, m, it->targets[0]);
    else
      apply_matrix_2q(out, m, it->targets[0], it->targets[1]);
  }
  out.check_norm();
  return out;
}

/// Full 2^n x 2^n matrix of the circuit; column k is the image of |k>.
inline MatrixX dense_unitary(const Circuit& circuit, const std::vector<double>& params,
                             int cap = kDenseCap) {
  if (circuit.n > cap)
    throw ResourceError("dense_unitary: " + std::to_string(circuit.n) +
                        " qubits exceeds dense cap " + std::to_string(cap));
  const std::size_t d = std::size_t{1} << circuit.n;
  MatrixX u(d, d);
  for (std::size_t k = 0; k < d; ++k) {
    StateVector col = apply_circuit(StateVector(circuit.n, k), circuit, params);
    for (std::size_t r = 0; r < d; ++r) u(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(k)) = col.amps[r];
  }
  return u;
}

inline MatrixX dense_unitary(const Circuit& circuit) {
  return dense_unitary(circuit, circuit.default_params);
}

// --- GHZ-like unitaries ----------------------------------------------------

/// (X^n + s Z^n)/sqrt(2) for odd n, (X^n + i s Z^n)/sqrt(2) for even n,
/// applied exactly through the paired-amplitude map. `sign` is +1 or -1.
inline StateVector apply_ghz_like(const StateVector& state, int sign) {
  if (sign != 1 && sign != -1) throw ValidationError("apply_ghz_like: sign must be +1 or -1");
  const bool odd = (state.n % 2) != 0;
  const double r = 1.0 / std::sqrt(2.0);
  const cplx phase = odd ? cplx(static_cast<double>(sign), 0.0)
                         : cplx(0.0, static_cast<double>(sign));
  StateVector out = state;
  const std::uint64_t dim = state.dim();
  const std::uint64_t mask = dim - 1;
  for (std::uint64_t x = 0; x < dim; ++x) {
    const std::uint64_t xb = x ^ mask;  // bitwise complement within n bits
    if (xb < x) continue;               // each pair handled once
    const double px = (std::popcount(x) % 2 == 0) ? 1.0 : -1.0;
    const double pxb = (std::popcount(xb) % 2 == 0) ? 1.0 : -1.0;
    const cplx ax = state.amps[x];
    const cplx axb = state.amps[xb];
    out.amps[x] = r * (axb + phase * px * ax);
    out.amps[xb] = r * (ax + phase * pxb * axb);
  }
  out.check_norm();
  return out;
}

/// Adjoint of apply_ghz_like: the map is Hermitian for odd n and swaps
/// sign for even n.
inline StateVector apply_ghz_like_adjoint(const StateVector& state, int sign) {
  const bool odd = (state.n % 2) != 0;
  return apply_ghz_like(state, odd ? sign : -sign);
}

inline MatrixX ghz_dense_unitary(int n, int sign, int cap = kDenseCap) {
  if (n > cap) throw ResourceError("ghz_dense_unitary: over dense cap");
  const std::size_t d = std::size_t{1} << n;
  MatrixX u(d, d);
  for (std::size_t k = 0; k < d; ++k) {
    StateVector col = apply_ghz_like(StateVector(n, k), sign);
    for (std::size_t r = 0; r < d; ++r) u(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(k)) = col.amps[r];
  }
  return u;
}

}  // namespace qsl
