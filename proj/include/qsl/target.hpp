// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <atomic>
#include <cstdint>
#include <memory>
#include <string>

#include "qsl/circuit.hpp"
#include "qsl/common.hpp"
#include "qsl/state.hpp"

namespace qsl {

/// Instrumented handle to the target unitary. Every output-state
/// preparation is counted, which is what the phase-separation audit
/// inspects: during the measurement phase the count grows to exactly
/// N * M, and training must leave it untouched.
class TargetHandle {
 public:
  virtual ~TargetHandle() = default;

  StateVector output_state(const StateVector& input) const {
    invocations_.fetch_add(1, std::memory_order_relaxed);
    return apply(input);
  }

  std::uint64_t invocations() const { return invocations_.load(std::memory_order_relaxed); }
  void reset_invocations() { invocations_.store(0, std::memory_order_relaxed); }

  virtual int qubits() const = 0;

  /// Structural description plus a content hash; parameter values are
  /// folded into the hash but never spelled out.
  virtual std::string description() const = 0;

 private:
  virtual StateVector apply(const StateVector& input) const = 0;
  mutable std::atomic<std::uint64_t> invocations_{0};
};

class CircuitTarget final : public TargetHandle {
 public:
  explicit CircuitTarget(Circuit circuit, std::string family = "circuit")
      : circuit_(std::move(circuit)), family_(std::move(family)) {}

  int qubits() const override { return circuit_.n; }

  const Circuit& circuit() const { return circuit_; }

  std::string description() const override {
    std::uint64_t h = fnv1a(circuit_.description);
    h = fnv1a(&circuit_.n, sizeof(circuit_.n), h);
    for (double p : circuit_.default_params) h = fnv1a(&p, sizeof(p), h);
    for (const auto& g : circuit_.gates) {
      h = fnv1a(g.name, h);
      h = fnv1a(g.targets.data(), sizeof(g.targets), h);
      h = fnv1a(g.matrix.data(), sizeof(cplx) * 16, h);
    }
    return family_ + ":n=" + std::to_string(circuit_.n) + ":hash=" + hex64(h);
  }

 private:
  StateVector apply(const StateVector& input) const override {
    return apply_circuit(input, circuit_);
  }

  Circuit circuit_;
  std::string family_;
};

class GhzTarget final : public TargetHandle {
 public:
  GhzTarget(int n, int sign) : n_(n), sign_(sign) {
    if (sign != 1 && sign != -1) throw ValidationError("GhzTarget: sign must be +1 or -1");
  }

  int qubits() const override { return n_; }
  int sign() const { return sign_; }

  std::string description() const override {
    // The sign enters only through the hash, never the visible text.
    std::uint64_t h = fnv1a("ghz");
    h = fnv1a(&n_, sizeof(n_), h);
    h = fnv1a(&sign_, sizeof(sign_), h);
    return "ghz:n=" + std::to_string(n_) + ":hash=" + hex64(h);
  }

 private:
  StateVector apply(const StateVector& input) const override {
    return apply_ghz_like(input, sign_);
  }

  int n_;
  int sign_;
};

}  // namespace qsl
