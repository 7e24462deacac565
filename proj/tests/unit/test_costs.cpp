// SPDX-License-Identifier: Apache-2.0
#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "oracles.hpp"
#include "qsl/costs.hpp"
#include "qsl/trotter.hpp"

using namespace qsl;

namespace {

std::vector<double> random_params(int count, std::uint64_t seed, double lo = -1.0,
                                  double hi = 1.0) {
  Rng rng = make_rng(seed);
  std::uniform_real_distribution<double> unif(lo, hi);
  std::vector<double> p(static_cast<std::size_t>(count));
  for (auto& v : p) v = unif(rng);
  return p;
}

double spearman(const std::vector<double>& a, const std::vector<double>& b) {
  auto ranks = [](const std::vector<double>& v) {
    std::vector<std::size_t> order(v.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t i, std::size_t j) { return v[i] < v[j]; });
    std::vector<double> r(v.size());
    for (std::size_t pos = 0; pos < order.size(); ++pos) r[order[pos]] = static_cast<double>(pos);
    return r;
  };
  const auto ra = ranks(a);
  const auto rb = ranks(b);
  const double n = static_cast<double>(a.size());
  double d2 = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d2 += (ra[i] - rb[i]) * (ra[i] - rb[i]);
  return 1.0 - 6.0 * d2 / (n * (n * n - 1.0));
}

// dense evaluation of the local cost, straight from the definition
double local_cost_dense(const Circuit& target, const Circuit& model,
                        const std::vector<double>& params,
                        const std::vector<ProductState>& inputs) {
  const int n = target.n;
  const MatrixX u = dense_unitary(target);
  const MatrixX v = dense_unitary(model, params);
  double acc = 0.0;
  for (const auto& ps : inputs) {
    const StateVector psi = to_statevector(ps);
    Eigen::VectorXcd vec(static_cast<Eigen::Index>(psi.dim()));
    for (std::size_t i = 0; i < psi.dim(); ++i) vec(static_cast<Eigen::Index>(i)) = psi.amps[i];
    MatrixX h = MatrixX::Zero(vec.size(), vec.size());
    for (int i = 0; i < n; ++i) {
      MatrixX proj(2, 2);
      const auto& f = ps.factors[static_cast<std::size_t>(i)];
      proj << f[0] * std::conj(f[0]), f[0] * std::conj(f[1]), f[1] * std::conj(f[0]),
          f[1] * std::conj(f[1]);
      MatrixX m = MatrixX::Ones(1, 1);
      for (int q = 0; q < n; ++q)
        m = oracles::kron(q == i ? proj : MatrixX::Identity(2, 2), m).eval();
      h += m;
    }
    h /= static_cast<double>(n);
    const Eigen::VectorXcd evolved = u * vec;
    acc += (evolved.adjoint() * v * h * v.adjoint() * evolved)(0).real();
  }
  return 1.0 - acc / static_cast<double>(inputs.size());
}

}  // namespace

TEST_CASE("hilbert-schmidt test cost") {
  SECTION("zero iff equal up to phase") {
    const Circuit u = oracles::random_circuit(3, 8, 4);
    REQUIRE(hst_cost(u, u, {}) == Catch::Approx(0.0).margin(1e-10));
  }
  SECTION("the GHZ-like pair is maximally distinguishable") {
    REQUIRE(hst_cost(ghz_dense_unitary(3, 1), ghz_dense_unitary(3, -1)) ==
            Catch::Approx(1.0).margin(1e-12));
  }
  SECTION("single-qubit RZ against identity follows 1 - cos^2(theta/2)") {
    for (double theta : {0.3, 1.1, kPi}) {
      Circuit id;
      id.n = 1;
      Circuit rz;
      rz.n = 1;
      rz.num_params = 1;
      rz.gates.push_back(gate_rz(0, 0.0, 0));
      const double expected = 1.0 - std::cos(theta / 2.0) * std::cos(theta / 2.0);
      REQUIRE(hst_cost(dense_unitary(id), dense_unitary(rz, {theta})) ==
              Catch::Approx(expected).margin(1e-12));
    }
  }
  SECTION("cap") {
    Circuit big;
    big.n = 11;
    REQUIRE_THROWS_AS(hst_cost(big, big, {}), ResourceError);
  }
}

TEST_CASE("global cost, exact") {
  const Circuit u = build_trotter_heisenberg(3, 0.2, 1);
  SECTION("vanishes at the target") {
    std::vector<StateVector> states{to_statevector(sample_stabilizer_product(3, 1)),
                                    to_statevector(sample_stabilizer_product(3, 2))};
    REQUIRE(global_cost_exact(u, u, u.default_params, states) ==
            Catch::Approx(0.0).margin(1e-10));
  }
  SECTION("orthogonal single-qubit case gives 1") {
    Circuit id;
    id.n = 1;
    Circuit x;
    x.n = 1;
    x.gates.push_back(gate_x(0));
    REQUIRE(global_cost_exact(id, x, {}, {make_product_state({"0"})}) ==
            Catch::Approx(1.0).margin(1e-12));
  }
  SECTION("haar average reproduces the scaled hilbert-schmidt cost") {
    const Circuit a = oracles::random_circuit(3, 6, 7);
    const Circuit b = oracles::random_circuit(3, 6, 8);
    std::vector<StateVector> states;
    for (int s = 0; s < 2000; ++s)
      states.push_back(oracles::random_state(3, static_cast<std::uint64_t>(3000 + s)));
    const double d = 8.0;
    const double expected = d / (d + 1.0) * hst_cost(a, b, {});
    REQUIRE(global_cost_exact(a, b, {}, states) == Catch::Approx(expected).margin(0.02));
  }
  SECTION("empty input list") {
    REQUIRE_THROWS_AS(global_cost_exact(u, u, u.default_params, {}), ValidationError);
  }
}

TEST_CASE("local cost, exact") {
  SECTION("vanishes at the target") {
    const Circuit u = build_trotter_heisenberg(4, 0.15, 1);
    std::vector<ProductState> inputs{sample_stabilizer_product(4, 3),
                                     sample_haar_product(4, 4)};
    REQUIRE(local_cost_exact(u, u, u.default_params, inputs) ==
            Catch::Approx(0.0).margin(1e-10));
  }
  SECTION("single-qubit X against identity on |0> gives 1") {
    Circuit id;
    id.n = 1;
    Circuit x;
    x.n = 1;
    x.gates.push_back(gate_x(0));
    REQUIRE(local_cost_exact(id, x, {}, {product_state_from_labels({"0"})}) ==
            Catch::Approx(1.0).margin(1e-12));
  }
  SECTION("matches the dense brute-force evaluation") {
    for (std::uint64_t seed = 0; seed < 4; ++seed) {
      const Circuit u = oracles::random_circuit(3, 7, 100 + seed);
      const Circuit v = build_trotter_heisenberg(3, 0.3, 1);
      const auto params = random_params(v.num_params, 200 + seed);
      std::vector<ProductState> inputs{sample_stabilizer_product(3, 300 + seed),
                                       sample_haar_product(3, 400 + seed)};
      REQUIRE(local_cost_exact(u, v, params, inputs) ==
              Catch::Approx(local_cost_dense(u, v, params, inputs)).margin(1e-9));
    }
  }
}

TEST_CASE("site observable back-propagation") {
  const std::array<cplx, 2> plus{cplx(1.0 / std::sqrt(2.0), 0.0),
                                 cplx(1.0 / std::sqrt(2.0), 0.0)};
  SECTION("depth zero keeps the bare projector") {
    Circuit id;
    id.n = 4;
    const SupportOperator op = backpropagate_site_observable(id, {}, 2, plus);
    REQUIRE(op.support == std::vector<int>{2});
    REQUIRE(std::abs(op.matrix(0, 0) - cplx(0.5, 0.0)) < 1e-12);
    REQUIRE(std::abs(op.matrix(0, 1) - cplx(0.5, 0.0)) < 1e-12);
  }
  SECTION("brickwork light cone stays inside the window") {
    const int n = 10;
    for (int depth : {1, 2, 3}) {
      const Circuit v = oracles::brickwork_circuit(n, depth, static_cast<std::uint64_t>(depth));
      for (int site : {0, 4, 9}) {
        const SupportOperator op = backpropagate_site_observable(v, {}, site, plus);
        REQUIRE(static_cast<int>(op.support.size()) <= 2 * depth + 1);
        for (int q : op.support) {
          REQUIRE(q >= site - depth);
          REQUIRE(q <= site + depth);
        }
      }
    }
  }
  SECTION("trace equals 2^(k-1)") {
    const Circuit v = oracles::brickwork_circuit(6, 2, 9);
    for (int site = 0; site < 6; ++site) {
      const SupportOperator op = backpropagate_site_observable(v, {}, site, plus);
      const double expected = std::pow(2.0, static_cast<int>(op.support.size()) - 1);
      REQUIRE(op.matrix.trace().real() == Catch::Approx(expected).margin(1e-8));
      REQUIRE(std::abs(op.matrix.trace().imag()) < 1e-10);
    }
  }
  SECTION("eigenvalues stay in [0, 1]") {
    const Circuit v = oracles::brickwork_circuit(5, 2, 31);
    const SupportOperator op = backpropagate_site_observable(v, {}, 2, plus);
    Eigen::SelfAdjointEigenSolver<MatrixX> es(op.matrix);
    REQUIRE(es.eigenvalues().minCoeff() > -1e-9);
    REQUIRE(es.eigenvalues().maxCoeff() < 1.0 + 1e-9);
  }
  SECTION("support cap advises the other measurement path") {
    const Circuit v = oracles::brickwork_circuit(10, 4, 2);
    REQUIRE_THROWS_AS(backpropagate_site_observable(v, {}, 5, plus, /*support_cap=*/6),
                      ResourceError);
    try {
      backpropagate_site_observable(v, {}, 5, plus, 6);
    } catch (const ResourceError& e) {
      REQUIRE(std::string(e.what()).find("Clifford") != std::string::npos);
    }
  }
}

TEST_CASE("support restriction is exact") {
  // contracting the back-propagated observable with the reduced density
  // matrix reproduces the statevector evaluation
  const int n = 5;
  const Circuit u = oracles::random_circuit(n, 8, 61);
  const Circuit v = build_trotter_heisenberg(n, 0.25, 1);
  const auto params = random_params(v.num_params, 62);
  const ProductState input = sample_stabilizer_product(n, 63);
  const StateVector evolved = apply_circuit(to_statevector(input), u);

  double via_support = 0.0;
  for (int i = 0; i < n; ++i) {
    const SupportOperator op =
        backpropagate_site_observable(v, params, i, input.factors[static_cast<std::size_t>(i)]);
    const MatrixX rho = oracles::reduced_density(evolved, op.support);
    via_support += (rho * op.matrix).trace().real();
  }
  const double cost_support = 1.0 - via_support / n;
  REQUIRE(cost_support ==
          Catch::Approx(local_cost_exact(u, v, params, {input})).margin(1e-9));
}

TEST_CASE("local cost from shadows") {
  const int n = 4;
  const Circuit u = build_trotter_heisenberg(n, 0.1, 1);
  const std::vector<ProductState> inputs{sample_stabilizer_product(n, 11),
                                         sample_stabilizer_product(n, 12)};
  std::vector<ShadowSet> shadows;
  for (std::size_t j = 0; j < inputs.size(); ++j)
    shadows.push_back(
        sample_pauli_shadow(apply_circuit(to_statevector(inputs[j]), u), 10000, 900 + j));

  SECTION("near zero at the target parameters") {
    const CostReport r = local_cost_from_shadows(shadows, u, u.default_params, inputs);
    REQUIRE(r.value <= 0.05);
    REQUIRE(r.n_terms == 2 * n);
  }
  SECTION("tracks the exact cost at random parameters") {
    int hits = 0;
    for (std::uint64_t s = 0; s < 5; ++s) {
      const auto params = random_params(u.num_params, 700 + s);
      const CostReport r = local_cost_from_shadows(shadows, u, params, inputs);
      const double exact = local_cost_exact(u, u, params, inputs);
      if (std::abs(r.value - exact) <= std::max(3.0 * *r.stderr_, 0.02)) ++hits;
    }
    REQUIRE(hits >= 4);
  }
  SECTION("re-evaluation at the same parameters is bit-identical") {
    const auto params = random_params(u.num_params, 55);
    const CostReport a = local_cost_from_shadows(shadows, u, params, inputs);
    const CostReport b = local_cost_from_shadows(shadows, u, params, inputs);
    REQUIRE(a.value == b.value);
    REQUIRE(*a.stderr_ == *b.stderr_);
    REQUIRE(a.params_hash == b.params_hash);
  }
  SECTION("shadow count must match the inputs") {
    REQUIRE_THROWS_AS(local_cost_from_shadows(shadows, u, u.default_params, {inputs[0]}),
                      ValidationError);
  }
}

TEST_CASE("global cost from shadows") {
  const int n = 3;
  const Circuit u = build_trotter_heisenberg(n, 0.2, 1);
  const std::vector<ProductState> product_inputs{sample_stabilizer_product(n, 21),
                                                 sample_stabilizer_product(n, 22)};
  std::vector<StateVector> inputs;
  std::vector<ShadowSet> shadows;
  for (std::size_t j = 0; j < product_inputs.size(); ++j) {
    inputs.push_back(to_statevector(product_inputs[j]));
    shadows.push_back(sample_clifford_shadow(apply_circuit(inputs[j], u), 20000, 800 + j));
  }
  SECTION("near zero at the target parameters") {
    const CostReport r = global_cost_from_shadows(shadows, u, u.default_params, inputs);
    REQUIRE(r.value <= 0.05);
  }
  SECTION("tracks the exact global cost") {
    const auto params = random_params(u.num_params, 500);
    const CostReport r = global_cost_from_shadows(shadows, u, params, inputs);
    const double exact = global_cost_exact(u, u, params, inputs);
    REQUIRE(std::abs(r.value - exact) <= std::max(3.0 * *r.stderr_, 0.03));
  }
}

TEST_CASE("orthogonal GHZ outputs have vanishing estimated fidelity") {
  const StateVector in = make_product_state({"0", "0", "0"});
  const ShadowSet shadow = sample_clifford_shadow(apply_ghz_like(in, 1), 20000, 5150);
  REQUIRE(estimate_fidelity_clifford(shadow, apply_ghz_like(in, -1)).value ==
          Catch::Approx(0.0).margin(0.05));
  REQUIRE(estimate_fidelity_clifford(shadow, apply_ghz_like(in, 1)).value ==
          Catch::Approx(1.0).margin(0.05));
}

TEST_CASE("test loss") {
  const Circuit u = build_trotter_heisenberg(6, 0.1, 1);
  SECTION("vanishes at the target") {
    REQUIRE(test_loss(u, u, u.default_params, 50, 1) == Catch::Approx(0.0).margin(1e-10));
  }
  SECTION("two seeds stay within the sampling-noise bound") {
    const auto params = random_params(u.num_params, 81);
    const double a = test_loss(u, u, params, 100, 1001);
    const double b = test_loss(u, u, params, 100, 1002);
    REQUIRE(std::abs(a - b) <= 0.15);
  }
  SECTION("correlates with the hilbert-schmidt cost") {
    const Circuit v5 = build_trotter_heisenberg(5, 0.1, 1);
    std::vector<double> tests, hsts;
    for (std::uint64_t s = 0; s < 20; ++s) {
      const auto params = random_params(v5.num_params, 6000 + s, -0.8, 0.8);
      tests.push_back(test_loss(v5, v5, params, 100, 42));
      hsts.push_back(hst_cost(v5, v5, params));
    }
    REQUIRE(spearman(tests, hsts) >= 0.9);
  }
}

TEST_CASE("exact cost reports stay in [0, 1]") {
  for (std::uint64_t s = 0; s < 5; ++s) {
    const Circuit u = oracles::random_circuit(3, 6, 70 + s);
    const Circuit v = build_trotter_heisenberg(3, 0.4, 1);
    const auto params = random_params(v.num_params, 80 + s, -2.0, 2.0);
    std::vector<ProductState> inputs{sample_stabilizer_product(3, 90 + s)};
    const double local = local_cost_exact(u, v, params, inputs);
    const double global = global_cost_exact(u, v, params, {to_statevector(inputs[0])});
    const double hst = hst_cost(u, v, params);
    for (double c : {local, global, hst}) {
      REQUIRE(c >= -1e-9);
      REQUIRE(c <= 1.0 + 1e-9);
    }
  }
}
