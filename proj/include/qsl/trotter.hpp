// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "qsl/circuit.hpp"
#include "qsl/common.hpp"

namespace qsl {

// Brickwork first-order Trotter layout: per layer, even bonds then odd
// bonds. Every exponential carries a parameter binding, so the builders
// double as the ansatz family; default_params reproduce the target at
// theta = 2 * coefficient * dt / layers.

/// First-order Trotterization of H = sum_i X_iX_{i+1} + Y_iY_{i+1} + Z_iZ_{i+1}
/// (open boundary), total time dt split over `layers` repetitions.
inline Circuit build_trotter_heisenberg(int n, double dt, int layers) {
  if (n < 2) throw ValidationError("build_trotter_heisenberg: need n >= 2");
  if (layers < 1) throw ValidationError("build_trotter_heisenberg: need layers >= 1");
  Circuit c;
  c.n = n;
  const double theta = 2.0 * dt / static_cast<double>(layers);
  int p = 0;
  for (int layer = 0; layer < layers; ++layer) {
    for (int parity = 0; parity < 2; ++parity) {
      for (int i = parity; i + 1 < n; i += 2) {
        for (const char* paulis : {"XX", "YY", "ZZ"}) {
          c.gates.push_back(gate_pauli_rotation(paulis, {i, i + 1}, theta, p));
          c.default_params.push_back(theta);
          ++p;
        }
      }
    }
  }
  c.num_params = p;
  c.description = "heisenberg:n=" + std::to_string(n) + ":layers=" + std::to_string(layers);
  c.validate();
  return c;
}

/// First-order Trotter circuit for H = sum_i Z_iZ_{i+1} + sum_i alpha_i X_i,
/// single layer: even ZZ bonds, odd ZZ bonds, then the X fields.
inline Circuit build_trotter_tfim(int n, double dt, const std::vector<double>& alphas) {
  if (n < 2) throw ValidationError("build_trotter_tfim: need n >= 2");
  if (static_cast<int>(alphas.size()) != n)
    throw ValidationError("build_trotter_tfim: need exactly n field coefficients");
  Circuit c;
  c.n = n;
  int p = 0;
  for (int parity = 0; parity < 2; ++parity) {
    for (int i = parity; i + 1 < n; i += 2) {
      const double theta = 2.0 * dt;
      c.gates.push_back(gate_pauli_rotation("ZZ", {i, i + 1}, theta, p));
      c.default_params.push_back(theta);
      ++p;
    }
  }
  for (int i = 0; i < n; ++i) {
    const double theta = 2.0 * alphas[i] * dt;
    c.gates.push_back(gate_pauli_rotation("X", {i}, theta, p));
    c.default_params.push_back(theta);
    ++p;
  }
  c.num_params = p;
  c.description = "tfim:n=" + std::to_string(n);
  c.validate();
  return c;
}

}  // namespace qsl
