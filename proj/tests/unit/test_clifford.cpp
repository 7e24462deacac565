// SPDX-License-Identifier: Apache-2.0
#include <catch2/catch_amalgamated.hpp>

#include <map>
#include <vector>

#include "oracles.hpp"
#include "qsl/clifford.hpp"

using namespace qsl;

namespace {

MatrixX dense_pauli(const PauliBits& p, int n) {
  std::vector<std::pair<int, char>> factors;
  for (int q = 0; q < n; ++q) {
    const bool x = (p.x >> q) & 1;
    const bool z = (p.z >> q) & 1;
    if (x && z)
      factors.push_back({q, 'Y'});
    else if (x)
      factors.push_back({q, 'X'});
    else if (z)
      factors.push_back({q, 'Z'});
  }
  MatrixX m = oracles::pauli_on(n, factors);
  if (p.sign) m = -m;
  return m;
}

MatrixX dense_gate(const CliffordGate& g, int n) {
  Circuit c;
  c.n = n;
  switch (g.kind) {
    case CliffordGate::kH: c.gates.push_back(gate_h(g.a)); break;
    case CliffordGate::kS: c.gates.push_back(gate_s(g.a)); break;
    case CliffordGate::kSdg: c.gates.push_back(gate_sdg(g.a)); break;
    case CliffordGate::kX: c.gates.push_back(gate_x(g.a)); break;
    case CliffordGate::kZ: c.gates.push_back(gate_z(g.a)); break;
    case CliffordGate::kCnot: c.gates.push_back(gate_cnot(g.a, g.b)); break;
  }
  return dense_unitary(c, {});
}

MatrixX dense_gates(const std::vector<CliffordGate>& gates, int n) {
  const std::size_t d = std::size_t{1} << n;
  MatrixX u = MatrixX::Identity(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
  for (const auto& g : gates) u = (dense_gate(g, n) * u).eval();
  return u;
}

Matrix2 canonical_phase(Matrix2 m) {
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
}

}  // namespace

TEST_CASE("pauli conjugation matches the dense rule for every gate kind") {
  const int n = 2;
  std::vector<CliffordGate> gates = {{CliffordGate::kH, 0, 0},    {CliffordGate::kH, 1, 0},
                                     {CliffordGate::kS, 0, 0},    {CliffordGate::kSdg, 1, 0},
                                     {CliffordGate::kX, 0, 0},    {CliffordGate::kZ, 1, 0},
                                     {CliffordGate::kCnot, 0, 1}, {CliffordGate::kCnot, 1, 0}};
  for (const auto& g : gates) {
    const MatrixX u = dense_gate(g, n);
    for (std::uint32_t x = 0; x < 4; ++x)
      for (std::uint32_t z = 0; z < 4; ++z)
        for (int sign = 0; sign < 2; ++sign) {
          PauliBits p{x, z, sign};
          const MatrixX expected = u * dense_pauli(p, n) * u.adjoint();
          PauliBits q = p;
          conjugate_pauli(q, g);
          REQUIRE((expected - dense_pauli(q, n)).cwiseAbs().maxCoeff() < 1e-12);
        }
  }
}

TEST_CASE("gate inverses invert") {
  for (auto kind : {CliffordGate::kH, CliffordGate::kS, CliffordGate::kSdg, CliffordGate::kX,
                    CliffordGate::kZ}) {
    CliffordGate g{kind, 0, 0};
    const MatrixX u = dense_gate(g, 1) * dense_gate(g.inverse(), 1);
    REQUIRE((u - MatrixX::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("sampled tableaus are valid and match the gate list") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng rng = make_rng(seed);
    const int n = 1 + static_cast<int>(seed % 4);
    const auto gates = sample_clifford_gates(n, rng);
    const CliffordTableau t = CliffordTableau::from_gates(n, gates);
    REQUIRE(t.is_valid());
    const MatrixX u = dense_gates(gates, n);
    for (int i = 0; i < n; ++i) {
      const MatrixX want_x = u * dense_pauli({std::uint32_t{1} << i, 0, 0}, n) * u.adjoint();
      REQUIRE((want_x - dense_pauli(t.x_images[static_cast<std::size_t>(i)], n))
                  .cwiseAbs()
                  .maxCoeff() < 1e-10);
    }
  }
}

TEST_CASE("tableau synthesis reproduces the tableau") {
  for (std::uint64_t seed = 100; seed < 130; ++seed) {
    Rng rng = make_rng(seed);
    const int n = 1 + static_cast<int>(seed % 5);
    const auto gates = sample_clifford_gates(n, rng);
    const CliffordTableau t = CliffordTableau::from_gates(n, gates);
    const auto resynth = t.to_gates();
    REQUIRE(CliffordTableau::from_gates(n, resynth) == t);
    // same unitary up to a global phase: probabilities agree on a probe
    const StateVector probe = oracles::random_state(n, seed);
    const StateVector a = apply_clifford(probe, gates);
    const StateVector b = apply_clifford(probe, resynth);
    for (std::size_t i = 0; i < a.dim(); ++i)
      REQUIRE(std::abs(std::abs(a.amps[i]) - std::abs(b.amps[i])) < 1e-10);
  }
}

TEST_CASE("tableau byte round trip") {
  for (int n : {1, 3, 6}) {
    Rng rng = make_rng(static_cast<std::uint64_t>(n));
    const auto gates = sample_clifford_gates(n, rng);
    const CliffordTableau t = CliffordTableau::from_gates(n, gates);
    REQUIRE(CliffordTableau::from_bytes(n, t.to_bytes()) == t);
  }
  SECTION("corrupt bytes are rejected") {
    Rng rng = make_rng(9);
    const auto gates = sample_clifford_gates(3, rng);
    auto bytes = CliffordTableau::from_gates(3, gates).to_bytes();
    bytes[0] ^= 0x01;
    REQUIRE_THROWS_AS(CliffordTableau::from_bytes(3, bytes), IntegrityError);
  }
}

TEST_CASE("single-qubit sampling is uniform over the 24 Cliffords") {
  const auto& table = clifford1_unitaries();
  REQUIRE(table.size() == 24);
  std::map<int, int> counts;
  const int draws = 100000;
  for (int d = 0; d < draws; ++d) {
    Rng rng = make_rng(31337, static_cast<std::uint64_t>(d));
    const auto gates = sample_clifford_gates(1, rng);
    const Matrix2 m = canonical_phase(dense_gates(gates, 1));
    int found = -1;
    for (std::size_t i = 0; i < table.size(); ++i)
      if ((m - table[i]).cwiseAbs().maxCoeff() < 1e-9) {
        found = static_cast<int>(i);
        break;
      }
    REQUIRE(found >= 0);
    counts[found] += 1;
  }
  REQUIRE(counts.size() == 24);
  for (const auto& [idx, count] : counts)
    REQUIRE(static_cast<double>(count) / draws == Catch::Approx(1.0 / 24.0).margin(0.005));
}

TEST_CASE("two-qubit sampling averages to the depolarizing moment") {
  // E_W[W^dag |b><b| W] = I / 2^n for any fixed b under a uniform Clifford
  const int n = 2;
  const int draws = 20000;
  MatrixX acc = MatrixX::Zero(4, 4);
  for (int d = 0; d < draws; ++d) {
    Rng rng = make_rng(777, static_cast<std::uint64_t>(d));
    const auto gates = sample_clifford_gates(n, rng);
    const MatrixX u = dense_gates(gates, n);
    acc += u.adjoint().col(1) * u.adjoint().col(1).adjoint();  // W^dag |01><01| W
  }
  acc /= static_cast<double>(draws);
  REQUIRE((acc - 0.25 * MatrixX::Identity(4, 4)).cwiseAbs().maxCoeff() < 0.02);
}

TEST_CASE("caps") {
  Rng rng = make_rng(1);
  REQUIRE_THROWS_AS(sample_clifford_gates(9, rng), ResourceError);
}
