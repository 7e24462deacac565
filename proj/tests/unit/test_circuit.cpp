// SPDX-License-Identifier: Apache-2.0
#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "oracles.hpp"
#include "qsl/circuit.hpp"

using namespace qsl;

TEST_CASE("single gates act as expected") {
  SECTION("X flips |0>") {
    Circuit c;
    c.n = 1;
    c.gates.push_back(gate_x(0));
    const StateVector out = apply_circuit(make_product_state({"0"}), c, {});
    REQUIRE(std::abs(out.amps[0]) == Catch::Approx(0.0).margin(1e-12));
    REQUIRE(out.amps[1].real() == Catch::Approx(1.0).margin(1e-12));
  }
  SECTION("RX(pi) gives -i|1>") {
    Circuit c;
    c.n = 1;
    c.num_params = 1;
    c.gates.push_back(gate_rx(0, 0.0, 0));
    const StateVector out = apply_circuit(make_product_state({"0"}), c, {kPi});
    REQUIRE(std::abs(out.amps[0]) == Catch::Approx(0.0).margin(1e-12));
    REQUIRE(out.amps[1].imag() == Catch::Approx(-1.0).margin(1e-12));
  }
}

TEST_CASE("circuit then its adjoint restores the state") {
  const Circuit c = oracles::random_circuit(3, 12, 99);
  const StateVector in = oracles::random_state(3, 5);
  const StateVector mid = apply_circuit(in, c, {});
  const StateVector back = apply_circuit_adjoint(mid, c, {});
  for (std::size_t i = 0; i < in.dim(); ++i)
    REQUIRE(std::abs(back.amps[i] - in.amps[i]) < 1e-9);
}

TEST_CASE("parametric gates stay unitary for any bound value") {
  Rng rng = make_rng(3);
  std::uniform_real_distribution<double> unif(-6.0, 6.0);
  for (int rep = 0; rep < 20; ++rep) {
    const double theta = unif(rng);
    const Gate g = gate_pauli_rotation("XY", {0, 1}, 0.0, 0);
    const MatrixX m = gate_matrix(g, {theta});
    REQUIRE((m * m.adjoint() - MatrixX::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("circuit validation") {
  Circuit c;
  c.n = 2;
  c.gates.push_back(gate_x(3));
  REQUIRE_THROWS_AS(c.validate(), ValidationError);

  Circuit gap;
  gap.n = 1;
  gap.num_params = 2;
  gap.gates.push_back(gate_rx(0, 0.0, 1));  // parameter 0 never used
  REQUIRE_THROWS_AS(gap.validate(), ValidationError);

  Circuit ok;
  ok.n = 1;
  ok.num_params = 1;
  ok.gates.push_back(gate_rx(0, 0.0, 0));
  REQUIRE_NOTHROW(ok.validate());
  REQUIRE_THROWS_AS(apply_circuit(StateVector(1), ok, {}), ValidationError);
}

TEST_CASE("dense unitary") {
  SECTION("identity circuit") {
    Circuit c;
    c.n = 2;
    REQUIRE((dense_unitary(c, {}) - MatrixX::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-12);
  }
  SECTION("X on qubit 0 permutes {0,1} and {2,3}") {
    Circuit c;
    c.n = 2;
    c.gates.push_back(gate_x(0));
    const MatrixX u = dense_unitary(c, {});
    REQUIRE(std::abs(u(1, 0) - cplx(1.0, 0.0)) < 1e-12);
    REQUIRE(std::abs(u(0, 1) - cplx(1.0, 0.0)) < 1e-12);
    REQUIRE(std::abs(u(3, 2) - cplx(1.0, 0.0)) < 1e-12);
    REQUIRE(std::abs(u(2, 3) - cplx(1.0, 0.0)) < 1e-12);
    REQUIRE(std::abs(u(0, 0)) < 1e-12);
  }
  SECTION("random circuit is unitary") {
    const Circuit c = oracles::random_circuit(3, 10, 1);
    const MatrixX u = dense_unitary(c, {});
    REQUIRE((u.adjoint() * u - MatrixX::Identity(8, 8)).cwiseAbs().maxCoeff() < 1e-9);
  }
  SECTION("cap") {
    Circuit c;
    c.n = 11;
    REQUIRE_THROWS_AS(dense_unitary(c, {}), ResourceError);
  }
}

TEST_CASE("ghz-like unitaries") {
  SECTION("n=1 with sign +1 is the Hadamard") {
    const StateVector out = apply_ghz_like(make_product_state({"0"}), 1);
    REQUIRE(out.amps[0].real() == Catch::Approx(1.0 / std::sqrt(2.0)).margin(1e-12));
    REQUIRE(out.amps[1].real() == Catch::Approx(1.0 / std::sqrt(2.0)).margin(1e-12));
  }
  SECTION("|000> maps to the orthogonal GHZ pair (up to global phase)") {
    for (int sign : {1, -1}) {
      const StateVector out = apply_ghz_like(make_product_state({"0", "0", "0"}), sign);
      REQUIRE(std::abs(out.amps[0]) == Catch::Approx(1.0 / std::sqrt(2.0)).margin(1e-12));
      const cplx relative = out.amps[7] / out.amps[0];
      REQUIRE(relative.real() == Catch::Approx(static_cast<double>(sign)).margin(1e-12));
      REQUIRE(std::abs(relative.imag()) < 1e-12);
      for (std::size_t i = 1; i < 7; ++i) REQUIRE(std::abs(out.amps[i]) < 1e-12);
    }
  }
  SECTION("the two variants are Hilbert-Schmidt orthogonal") {
    for (int n = 1; n <= 6; ++n) {
      const MatrixX up = ghz_dense_unitary(n, 1);
      const MatrixX um = ghz_dense_unitary(n, -1);
      const double d = static_cast<double>(std::size_t{1} << n);
      REQUIRE(std::norm((up.adjoint() * um).trace()) / (d * d) < 1e-12);
      REQUIRE((up * up.adjoint() - MatrixX::Identity(up.rows(), up.cols()))
                  .cwiseAbs()
                  .maxCoeff() < 1e-10);
    }
  }
  SECTION("applying the map then its adjoint restores the state") {
    for (int n : {2, 3, 4, 5}) {
      for (int sign : {1, -1}) {
        const StateVector in = oracles::random_state(n, static_cast<std::uint64_t>(10 + n));
        const StateVector round =
            apply_ghz_like_adjoint(apply_ghz_like(in, sign), sign);
        for (std::size_t i = 0; i < in.dim(); ++i)
          REQUIRE(std::abs(round.amps[i] - in.amps[i]) < 1e-12);
      }
    }
  }
  SECTION("squares to the identity up to phase for odd n") {
    const StateVector in = oracles::random_state(3, 77);
    const StateVector twice = apply_ghz_like(apply_ghz_like(in, 1), 1);
    // fix the global phase against the largest amplitude
    std::size_t ref = 0;
    for (std::size_t i = 0; i < in.dim(); ++i)
      if (std::abs(in.amps[i]) > std::abs(in.amps[ref])) ref = i;
    const cplx phase = twice.amps[ref] / in.amps[ref];
    REQUIRE(std::abs(std::abs(phase) - 1.0) < 1e-10);
    for (std::size_t i = 0; i < in.dim(); ++i)
      REQUIRE(std::abs(twice.amps[i] - phase * in.amps[i]) < 1e-10);
  }
}

TEST_CASE("norm is preserved by every application path") {
  const Circuit c = oracles::random_circuit(4, 20, 2024);
  const StateVector in = oracles::random_state(4, 3);
  REQUIRE(std::abs(apply_circuit(in, c, {}).norm_sq() - 1.0) <= 1e-10);
  REQUIRE(std::abs(apply_ghz_like(in, -1).norm_sq() - 1.0) <= 1e-10);
}
