// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>
#include <array>
#include <bit>
#include <cstdint>
#include <string>
#include <vector>

#include "qsl/circuit.hpp"
#include "qsl/common.hpp"
#include "qsl/state.hpp"

namespace qsl {

/// n-qubit Pauli with sign, packed as x/z bitmasks (bit q = qubit q).
/// sign is 0 for +P, 1 for -P. Phases i, -i never arise here: all updates
/// below are conjugations, which preserve Hermiticity.
struct PauliBits {
  std::uint32_t x = 0;
  std::uint32_t z = 0;
  int sign = 0;

  bool identity() const { return x == 0 && z == 0; }

  bool commutes_with(const PauliBits& other) const {
    return (std::popcount(x & other.z) + std::popcount(z & other.x)) % 2 == 0;
  }

  bool operator==(const PauliBits& other) const = default;
};

struct CliffordGate {
  enum Kind { kH, kS, kSdg, kX, kZ, kCnot };
  Kind kind;
  int a = 0;  // qubit (or control for CNOT)
  int b = 0;  // CNOT target

  CliffordGate inverse() const {
    CliffordGate g = *this;
    if (kind == kS) g.kind = kSdg;
    else if (kind == kSdg) g.kind = kS;
    return g;
  }
};

/// In-place update of P -> g P g^dagger.
inline void conjugate_pauli(PauliBits& p, const CliffordGate& g) {
  const std::uint32_t ba = std::uint32_t{1} << g.a;
  switch (g.kind) {
    case CliffordGate::kH: {
      if ((p.x & ba) && (p.z & ba)) p.sign ^= 1;  // Y -> -Y
      const bool xa = p.x & ba;
      const bool za = p.z & ba;
      if (xa != za) {  // swap the x and z bits at a
        p.x ^= ba;
        p.z ^= ba;
      }
      break;
    }
    case CliffordGate::kS: {
      if ((p.x & ba) && (p.z & ba)) p.sign ^= 1;  // Y -> -X
      if (p.x & ba) p.z ^= ba;
      break;
    }
    case CliffordGate::kSdg: {
      if ((p.x & ba) && !(p.z & ba)) p.sign ^= 1;  // X -> -Y
      if (p.x & ba) p.z ^= ba;
      break;
    }
    case CliffordGate::kX: {
      if (p.z & ba) p.sign ^= 1;
      break;
    }
    case CliffordGate::kZ: {
      if (p.x & ba) p.sign ^= 1;
      break;
    }
    case CliffordGate::kCnot: {
      const std::uint32_t bb = std::uint32_t{1} << g.b;
      const bool xc = p.x & ba;
      const bool zc = p.z & ba;
      const bool xt = p.x & bb;
      const bool zt = p.z & bb;
      if (xc && zt && (xt == zc)) p.sign ^= 1;
      if (xc) p.x ^= bb;
      if (zt) p.z ^= ba;
      break;
    }
  }
}

inline void conjugate_pauli(PauliBits& p, const std::vector<CliffordGate>& gates) {
  for (const auto& g : gates) conjugate_pauli(p, g);
}

namespace detail {

/// Appends gates that sweep the anticommuting pair (p, q), supported on
/// qubits >= pivot, to exactly (X_pivot, Z_pivot). p and q are updated in
/// place; the scan order is fixed, so the sweep is deterministic.
inline void sweep_pair(PauliBits& p, PauliBits& q, int pivot, int n,
                       std::vector<CliffordGate>& gates) {
  auto emit = [&](CliffordGate g) {
    conjugate_pauli(p, g);
    conjugate_pauli(q, g);
    gates.push_back(g);
  };
  // 1. Make p pure-X: clear z components qubit by qubit.
  for (int j = pivot; j < n; ++j) {
    const std::uint32_t bj = std::uint32_t{1} << j;
    if (p.z & bj) emit({(p.x & bj) ? CliffordGate::kS : CliffordGate::kH, j, 0});
  }
  // 2. Fold all X bits of p onto the pivot.
  int first = -1;
  for (int j = pivot; j < n; ++j)
    if (p.x & (std::uint32_t{1} << j)) {
      first = j;
      break;
    }
  for (int j = first + 1; j < n; ++j)
    if (p.x & (std::uint32_t{1} << j)) emit({CliffordGate::kCnot, first, j});
  if (first != pivot) {
    emit({CliffordGate::kCnot, first, pivot});
    emit({CliffordGate::kCnot, pivot, first});
    emit({CliffordGate::kCnot, first, pivot});
  }
  // p is now +-X_pivot. If q is already +-Z_pivot, only signs remain.
  const std::uint32_t bp = std::uint32_t{1} << pivot;
  if (!(q.x == 0 && q.z == bp)) {
    // 3. Temporarily rotate the pivot so p = Z_pivot, then sweep q to
    //    X_pivot with gates that fix Z_pivot.
    emit({CliffordGate::kH, pivot, 0});
    for (int j = pivot + 1; j < n; ++j) {
      const std::uint32_t bj = std::uint32_t{1} << j;
      if (q.z & bj) emit({(q.x & bj) ? CliffordGate::kS : CliffordGate::kH, j, 0});
    }
    if (q.z & bp) emit({CliffordGate::kS, pivot, 0});  // q has Y at pivot
    for (int j = pivot + 1; j < n; ++j)
      if (q.x & (std::uint32_t{1} << j)) emit({CliffordGate::kCnot, pivot, j});
    emit({CliffordGate::kH, pivot, 0});
  }
  // 4. Fix signs with pivot Paulis: Z flips X_pivot, X flips Z_pivot.
  if (p.sign) emit({CliffordGate::kZ, pivot, 0});
  if (q.sign) emit({CliffordGate::kX, pivot, 0});
}

inline PauliBits random_pauli_on(int pivot, int n, Rng& rng, bool nonidentity) {
  const unsigned span = static_cast<unsigned>(n - pivot);
  std::uniform_int_distribution<std::uint64_t> dist(0, (std::uint64_t{1} << (2 * span)) - 1);
  std::uniform_int_distribution<int> coin(0, 1);
  const std::uint32_t mask = (std::uint32_t{1} << span) - 1;
  for (;;) {
    const std::uint64_t raw = dist(rng);
    PauliBits p;
    p.x = (static_cast<std::uint32_t>(raw) & mask) << pivot;
    p.z = static_cast<std::uint32_t>(raw >> span) << pivot;
    p.sign = coin(rng);
    if (!nonidentity || !p.identity()) return p;
  }
}

}  // namespace detail

/// Uniform n-qubit Clifford as an explicit gate list. Round i samples a
/// uniformly random anticommuting signed Pauli pair on qubits i..n-1 and
/// prepends the inverse of the sweep that maps it to (X_i, Z_i); the choice
/// counts per round multiply to exactly the Clifford group order (mod
/// global phase), which makes the draw uniform.
inline std::vector<CliffordGate> sample_clifford_gates(int n, Rng& rng) {
  if (n < 1) throw ValidationError("sample_clifford_gates: n >= 1 required");
  if (n > kCliffordCap)
    throw ResourceError("sample_clifford_gates: n exceeds Clifford cap " +
                        std::to_string(kCliffordCap));
  std::vector<CliffordGate> sweeps;
  for (int i = 0; i < n; ++i) {
    PauliBits p = detail::random_pauli_on(i, n, rng, /*nonidentity=*/true);
    PauliBits q;
    do {
      q = detail::random_pauli_on(i, n, rng, /*nonidentity=*/false);
    } while (p.commutes_with(q));
    detail::sweep_pair(p, q, i, n, sweeps);
  }
  // The sweeps compose to C with C U = identity, so U is the whole flat
  // list reversed and inverted; the sampled round-i pair is then exactly
  // (U X_i U^dag, U Z_i U^dag).
  std::vector<CliffordGate> result;
  result.reserve(sweeps.size());
  for (auto it = sweeps.rbegin(); it != sweeps.rend(); ++it)
    result.push_back(it->inverse());
  return result;
}

inline void apply_clifford_gate(StateVector& state, const CliffordGate& g) {
  static const Matrix2 h = hadamard_matrix();
  static const Matrix2 s = phase_s_matrix();
  static const Matrix2 sdg = phase_s_matrix().adjoint();
  static const Matrix2 x = pauli_matrix_1q('X');
  static const Matrix2 z = pauli_matrix_1q('Z');
  switch (g.kind) {
    case CliffordGate::kH: apply_matrix_1q(state, h, g.a); break;
    case CliffordGate::kS: apply_matrix_1q(state, s, g.a); break;
    case CliffordGate::kSdg: apply_matrix_1q(state, sdg, g.a); break;
    case CliffordGate::kX: apply_matrix_1q(state, x, g.a); break;
    case CliffordGate::kZ: apply_matrix_1q(state, z, g.a); break;
    case CliffordGate::kCnot: {
      const std::uint64_t bc = std::uint64_t{1} << g.a;
      const std::uint64_t bt = std::uint64_t{1} << g.b;
      for (std::uint64_t i = 0; i < state.dim(); ++i)
        if ((i & bc) && !(i & bt)) std::swap(state.amps[i], state.amps[i | bt]);
      break;
    }
  }
}

inline StateVector apply_clifford(const StateVector& state,
                                  const std::vector<CliffordGate>& gates) {
  StateVector out = state;
  for (const auto& g : gates) apply_clifford_gate(out, g);
  return out;
}

/// Stabilizer-style description of a Clifford W: rows are the images
/// W X_i W^dag and W Z_i W^dag. Serialized row-major as
/// [x_0..x_{n-1}, z_0..z_{n-1}, sign] bits per row, X-rows first.
struct CliffordTableau {
  int n = 0;
  std::vector<PauliBits> x_images;
  std::vector<PauliBits> z_images;

  bool operator==(const CliffordTableau& other) const = default;

  static CliffordTableau from_gates(int n, const std::vector<CliffordGate>& gates) {
    CliffordTableau t;
    t.n = n;
    t.x_images.resize(static_cast<std::size_t>(n));
    t.z_images.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      PauliBits px{std::uint32_t{1} << i, 0, 0};
      PauliBits pz{0, std::uint32_t{1} << i, 0};
      conjugate_pauli(px, gates);
      conjugate_pauli(pz, gates);
      t.x_images[static_cast<std::size_t>(i)] = px;
      t.z_images[static_cast<std::size_t>(i)] = pz;
    }
    return t;
  }

  /// Symplectic validity: image pairs anticommute exactly at the partner.
  bool is_valid() const {
    if (static_cast<int>(x_images.size()) != n || static_cast<int>(z_images.size()) != n)
      return false;
    const std::uint32_t mask = (n == 32) ? ~0u : ((std::uint32_t{1} << n) - 1);
    auto row_ok = [&](const PauliBits& p) {
      return (p.x & ~mask) == 0 && (p.z & ~mask) == 0 && (p.sign == 0 || p.sign == 1);
    };
    for (int i = 0; i < n; ++i) {
      if (!row_ok(x_images[static_cast<std::size_t>(i)]) ||
          !row_ok(z_images[static_cast<std::size_t>(i)]))
        return false;
      if (x_images[static_cast<std::size_t>(i)].identity() ||
          z_images[static_cast<std::size_t>(i)].identity())
        return false;
      for (int j = 0; j < n; ++j) {
        const bool want_anti = (i == j);
        if (x_images[static_cast<std::size_t>(i)].commutes_with(
                z_images[static_cast<std::size_t>(j)]) == want_anti)
          return false;
        if (!x_images[static_cast<std::size_t>(i)].commutes_with(
                x_images[static_cast<std::size_t>(j)]))
          return false;
        if (!z_images[static_cast<std::size_t>(i)].commutes_with(
                z_images[static_cast<std::size_t>(j)]))
          return false;
      }
    }
    return true;
  }

  /// Deterministic synthesis of a gate list realizing this tableau
  /// (signs included; global phase free).
  std::vector<CliffordGate> to_gates() const {
    std::vector<PauliBits> px = x_images;
    std::vector<PauliBits> pz = z_images;
    std::vector<CliffordGate> reduction;
    for (int i = 0; i < n; ++i) {
      std::vector<CliffordGate> sweep;
      detail::sweep_pair(px[static_cast<std::size_t>(i)], pz[static_cast<std::size_t>(i)], i, n, sweep);
      for (const auto& g : sweep) {
        for (int j = i + 1; j < n; ++j) {
          conjugate_pauli(px[static_cast<std::size_t>(j)], g);
          conjugate_pauli(pz[static_cast<std::size_t>(j)], g);
        }
        reduction.push_back(g);
      }
    }
    std::vector<CliffordGate> gates;
    gates.reserve(reduction.size());
    for (auto it = reduction.rbegin(); it != reduction.rend(); ++it)
      gates.push_back(it->inverse());
    return gates;
  }

  std::vector<std::uint8_t> to_bytes() const {
    const int row_bits = 2 * n + 1;
    const int total_bits = 2 * n * row_bits;
    std::vector<std::uint8_t> bytes(static_cast<std::size_t>((total_bits + 7) / 8), 0);
    int bit = 0;
    auto push = [&](bool v) {
      if (v) bytes[static_cast<std::size_t>(bit / 8)] |= static_cast<std::uint8_t>(1u << (bit % 8));
      ++bit;
    };
    auto push_row = [&](const PauliBits& p) {
      for (int q = 0; q < n; ++q) push((p.x >> q) & 1);
      for (int q = 0; q < n; ++q) push((p.z >> q) & 1);
      push(p.sign != 0);
    };
    for (int i = 0; i < n; ++i) push_row(x_images[static_cast<std::size_t>(i)]);
    for (int i = 0; i < n; ++i) push_row(z_images[static_cast<std::size_t>(i)]);
    return bytes;
  }

  static CliffordTableau from_bytes(int n, const std::vector<std::uint8_t>& bytes) {
    CliffordTableau t;
    t.n = n;
    const int row_bits = 2 * n + 1;
    const int total_bits = 2 * n * row_bits;
    if (static_cast<int>(bytes.size()) != (total_bits + 7) / 8)
      throw IntegrityError("clifford tableau has wrong byte length");
    int bit = 0;
    auto pull = [&]() {
      bool v = (bytes[static_cast<std::size_t>(bit / 8)] >> (bit % 8)) & 1;
      ++bit;
      return v;
    };
    auto pull_row = [&]() {
      PauliBits p;
      for (int q = 0; q < n; ++q)
        if (pull()) p.x |= std::uint32_t{1} << q;
      for (int q = 0; q < n; ++q)
        if (pull()) p.z |= std::uint32_t{1} << q;
      p.sign = pull() ? 1 : 0;
      return p;
    };
    for (int i = 0; i < n; ++i) t.x_images.push_back(pull_row());
    for (int i = 0; i < n; ++i) t.z_images.push_back(pull_row());
    if (!t.is_valid()) throw IntegrityError("clifford tableau fails symplectic checks");
    return t;
  }
};

/// The 24 single-qubit Cliffords as 2x2 unitaries, generated by closing
/// {H, S} under multiplication with a fixed global-phase canonicalization.
/// The table order is deterministic across runs.
inline const std::vector<Matrix2>& clifford1_unitaries() {
  static const std::vector<Matrix2> table = [] {
    auto canonical = [](Matrix2 m) {
      // normalize global phase: first entry of largest modulus -> positive real
      int br = 0, bc = 0;
      double best = -1.0;
      for (int r = 0; r < 2; ++r)
        for (int c = 0; c < 2; ++c)
          if (std::abs(m(r, c)) > best + 1e-12) {
            best = std::abs(m(r, c));
            br = r;
            bc = c;
          }
      m *= std::abs(m(br, bc)) / m(br, bc);
      return m;
    };
    auto same = [](const Matrix2& a, const Matrix2& b) {
      return (a - b).cwiseAbs().maxCoeff() < 1e-9;
    };
    std::vector<Matrix2> found{canonical(Matrix2::Identity())};
    const Matrix2 gens[2] = {hadamard_matrix(), phase_s_matrix()};
    for (std::size_t i = 0; i < found.size(); ++i) {
      for (const auto& g : gens) {
        Matrix2 cand = canonical(g * found[i]);
        bool fresh = true;
        for (const auto& f : found)
          if (same(f, cand)) {
            fresh = false;
            break;
          }
        if (fresh) found.push_back(cand);
      }
    }
    if (found.size() != 24) throw NumericError("single-qubit Clifford closure != 24");
    return found;
  }();
  return table;
}

}  // namespace qsl
