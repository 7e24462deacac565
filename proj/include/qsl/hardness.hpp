// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "qsl/circuit.hpp"
#include "qsl/clifford.hpp"
#include "qsl/common.hpp"
#include "qsl/state.hpp"

namespace qsl {

// --- exact closed-form constants ---------------------------------------------

namespace detail {

inline Eigen::Vector2cd stab_vector(int label) {
  const auto a = stab_amps(label);
  Eigen::Vector2cd v;
  v << a[0], a[1];
  return v;
}

}  // namespace detail

/// (1/36) sum over the 6x6 single-qubit stabilizer pairs of
/// |<x|A|y><y|B|x>| for arbitrary 2x2 operators A, B.
inline double stabilizer_pair_sum(const Matrix2& a, const Matrix2& b) {
  double total = 0.0;
  for (int lx = 0; lx < kNumStabLabels; ++lx) {
    const Eigen::Vector2cd x = detail::stab_vector(lx);
    for (int ly = 0; ly < kNumStabLabels; ++ly) {
      const Eigen::Vector2cd y = detail::stab_vector(ly);
      const cplx v = (x.adjoint() * a * y)(0) * (y.adjoint() * b * x)(0);
      total += std::abs(v);
    }
  }
  return total / 36.0;
}

/// The stabilizer X/Z overlap constant, 7/18, by exact enumeration.
inline double stabilizer_constant() {
  return stabilizer_pair_sum(pauli_matrix_1q('X'), pauli_matrix_1q('Z'));
}

struct SingleMeasurementTv {
  double exact_tv = 0.0;  // per-parity real/imaginary part sum
  double bound = 0.0;     // (14/18)^n
  double abs_sum = 0.0;   // equals the bound up to roundoff
};

/// Exact total variation distance of one random-Pauli measurement round
/// between the two GHZ-like hypotheses, by enumerating all 36^n
/// (input, outcome-projector) product pairs. Capped at n = 4.
inline SingleMeasurementTv single_measurement_tv(int n) {
  if (n < 1) throw ValidationError("single_measurement_tv: n >= 1 required");
  if (n > 4) throw ResourceError("single_measurement_tv: exact enumeration capped at n = 4");
  // per-qubit table: z(phi, psi) = <phi|X|psi><psi|Z|phi>
  std::array<std::array<cplx, kNumStabLabels>, kNumStabLabels> z{};
  const Matrix2 x = pauli_matrix_1q('X');
  const Matrix2 zp = pauli_matrix_1q('Z');
  for (int lphi = 0; lphi < kNumStabLabels; ++lphi)
    for (int lpsi = 0; lpsi < kNumStabLabels; ++lpsi) {
      const auto phi = detail::stab_vector(lphi);
      const auto psi = detail::stab_vector(lpsi);
      z[static_cast<std::size_t>(lphi)][static_cast<std::size_t>(lpsi)] =
          (phi.adjoint() * x * psi)(0) * (psi.adjoint() * zp * phi)(0);
    }
  const bool odd = (n % 2) != 0;
  const double weight = std::pow(1.0 / 18.0, n);
  double tv = 0.0;
  double abs_sum = 0.0;
  std::vector<int> digits(static_cast<std::size_t>(n), 0);  // base-36 counter
  const std::uint64_t total = static_cast<std::uint64_t>(std::pow(36.0, n) + 0.5);
  for (std::uint64_t it = 0; it < total; ++it) {
    cplx prod(1.0, 0.0);
    for (int q = 0; q < n; ++q) {
      const int d = digits[static_cast<std::size_t>(q)];
      prod *= z[static_cast<std::size_t>(d / 6)][static_cast<std::size_t>(d % 6)];
    }
    tv += std::abs(odd ? prod.real() : prod.imag());
    abs_sum += std::abs(prod);
    for (int q = 0; q < n; ++q) {
      if (++digits[static_cast<std::size_t>(q)] < 36) break;
      digits[static_cast<std::size_t>(q)] = 0;
    }
  }
  SingleMeasurementTv out;
  out.exact_tv = tv * weight;
  out.abs_sum = abs_sum * weight;
  out.bound = std::pow(14.0 / 18.0, n);
  return out;
}

struct TwirlMoments {
  double m2 = 0.0;     // E[z^2], (-1/9)^n
  double mabs2 = 0.0;  // E[z conj(z)], (2/9)^n
};

/// Exact local-Clifford twirl moments of
///   z = Tr[W2 |phi><phi| W2^dag X W1 |psi><psi| W1^dag Z],
/// enumerated over the 24x24 single-qubit Clifford pairs per qubit and
/// raised to the n-th power. The 2-design property makes the result
/// independent of the fixed single-qubit states psi, phi.
inline TwirlMoments twirl_moments(int n, const Eigen::Vector2cd& psi, const Eigen::Vector2cd& phi) {
  if (n < 1 || n > 6) throw ResourceError("twirl_moments: n must be in 1..6");
  const auto& c1 = clifford1_unitaries();
  const Matrix2 x = pauli_matrix_1q('X');
  const Matrix2 z = pauli_matrix_1q('Z');
  cplx m2_single(0.0, 0.0);
  double mabs2_single = 0.0;
  for (const auto& w1 : c1) {
    const Matrix2 in = w1 * psi * psi.adjoint() * w1.adjoint();
    for (const auto& w2 : c1) {
      const Matrix2 out = w2 * phi * phi.adjoint() * w2.adjoint();
      const cplx zv = (out * x * in * z).trace();
      m2_single += zv * zv;
      mabs2_single += std::norm(zv);
    }
  }
  m2_single /= 576.0;
  mabs2_single /= 576.0;
  if (std::abs(m2_single.imag()) > 1e-12)
    throw NumericError("twirl_moments: second moment should be real");
  TwirlMoments out;
  out.m2 = std::pow(m2_single.real(), n);
  out.mabs2 = std::pow(mabs2_single, n);
  return out;
}

inline TwirlMoments twirl_moments(int n) {
  return twirl_moments(n, detail::stab_vector(kZero), detail::stab_vector(kZero));
}

// --- distinguishing experiments -----------------------------------------------

/// Per-qubit single-qubit Clifford indices for the hidden twirl
/// W2 U_{+-} W1; revealed to the guesser only after all measurements.
struct TwirlAssignment {
  std::vector<int> w1;
  std::vector<int> w2;
};

struct MeasurementRound {
  ProductState input;
  std::vector<Matrix2> rotations;  // map each qubit's measurement basis to computational
  std::string basis_labels;        // "XYZ..." when the basis is a Pauli one, else "*"
  std::string outcome;             // bits, filled by the experiment
};

/// Adaptive product-input / product-measurement strategy. Implementations
/// must be stateless across calls: trials run concurrently.
class Strategy {
 public:
  virtual ~Strategy() = default;
  virtual std::string id() const = 0;
  virtual MeasurementRound next(const std::vector<MeasurementRound>& history, Rng& rng) const = 0;
  virtual int guess(const std::vector<MeasurementRound>& history,
                    const std::optional<TwirlAssignment>& twirl, Rng& rng) const = 0;
};

struct DistinguishRecord {
  int n = 0;
  std::string strategy_id;
  bool twirl = false;
  int budget = 0;
  int trials = 0;
  int successes = 0;
  std::uint64_t seed = 0;

  double success_rate() const {
    return trials > 0 ? static_cast<double>(successes) / trials : 0.0;
  }
};

namespace detail {

inline std::vector<Matrix2> pauli_basis_rotations(const std::string& bases) {
  std::vector<Matrix2> rot;
  rot.reserve(bases.size());
  for (char b : bases) {
    if (b == 'X')
      rot.push_back(hadamard_matrix());
    else if (b == 'Y')
      rot.push_back((hadamard_matrix() * phase_s_matrix().adjoint()).eval());
    else if (b == 'Z')
      rot.push_back(Matrix2::Identity());
    else
      throw ValidationError("pauli_basis_rotations: bad basis character");
  }
  return rot;
}

inline void validate_round(int n, const MeasurementRound& round) {
  if (round.input.n() != n) throw ValidationError("strategy returned an input of wrong size");
  for (const auto& f : round.input.factors) validate_factor(f, 1e-9);
  if (static_cast<int>(round.rotations.size()) != n)
    throw ValidationError("strategy returned wrong number of basis rotations");
  for (const auto& r : round.rotations)
    if ((r * r.adjoint() - Matrix2::Identity()).cwiseAbs().maxCoeff() > 1e-9)
      throw ValidationError("strategy returned a non-unitary basis rotation");
}

/// Output state of the (optionally twirled) GHZ-like target, after the
/// strategy's basis rotations; measuring it in the computational basis
/// realizes the chosen product measurement.
inline StateVector simulate_round(int n, int sign, const std::optional<TwirlAssignment>& twirl,
                                  const MeasurementRound& round) {
  StateVector state = to_statevector(round.input);
  const auto& c1 = clifford1_unitaries();
  if (twirl)
    for (int q = 0; q < n; ++q)
      apply_matrix_1q(state, c1[static_cast<std::size_t>(twirl->w1[static_cast<std::size_t>(q)])], q);
  state = apply_ghz_like(state, sign);
  if (twirl)
    for (int q = 0; q < n; ++q)
      apply_matrix_1q(state, c1[static_cast<std::size_t>(twirl->w2[static_cast<std::size_t>(q)])], q);
  for (int q = 0; q < n; ++q) apply_matrix_1q(state, round.rotations[static_cast<std::size_t>(q)], q);
  return state;
}

inline double outcome_probability(int n, int sign, const std::optional<TwirlAssignment>& twirl,
                                  const MeasurementRound& round) {
  const StateVector state = simulate_round(n, sign, twirl, round);
  std::uint64_t index = 0;
  for (int q = 0; q < n; ++q)
    if (round.outcome[static_cast<std::size_t>(q)] == '1') index |= std::uint64_t{1} << q;
  return std::norm(state.amps[index]);
}

/// Exact likelihood of the whole transcript under hypothesis `sign`.
inline double transcript_likelihood(int n, int sign, const std::optional<TwirlAssignment>& twirl,
                                    const std::vector<MeasurementRound>& history) {
  double l = 1.0;
  for (const auto& round : history) l *= outcome_probability(n, sign, twirl, round);
  return l;
}

}  // namespace detail

/// Runs `trials` independent repetitions of the two-hypothesis experiment:
/// a hidden uniform sign, optionally a hidden local-Clifford twirl pair,
/// `budget` adaptive product measurements, then one guess per trial. With
/// the twirl enabled, the assignment is revealed to guess() only after the
/// measurements, matching the reveal-after protocol.
inline DistinguishRecord run_distinguishing_experiment(int n, const Strategy& strategy, int budget,
                                                       int trials, bool twirl,
                                                       std::uint64_t seed) {
  if (budget < 1) throw ValidationError("run_distinguishing_experiment: budget >= 1 required");
  if (trials < 1) throw ValidationError("run_distinguishing_experiment: trials >= 1 required");
  std::vector<std::uint8_t> wins(static_cast<std::size_t>(trials), 0);
  parallel_for(static_cast<std::size_t>(trials), [&](std::size_t t) {
    Rng rng = make_rng(seed, t);
    std::uniform_int_distribution<int> coin(0, 1);
    const int sign = coin(rng) ? 1 : -1;
    std::optional<TwirlAssignment> assignment;
    if (twirl) {
      std::uniform_int_distribution<int> pick(0, 23);
      TwirlAssignment a;
      for (int q = 0; q < n; ++q) {
        a.w1.push_back(pick(rng));
        a.w2.push_back(pick(rng));
      }
      assignment = std::move(a);
    }
    std::vector<MeasurementRound> history;
    history.reserve(static_cast<std::size_t>(budget));
    for (int r = 0; r < budget; ++r) {
      MeasurementRound round = strategy.next(history, rng);
      detail::validate_round(n, round);
      StateVector state = detail::simulate_round(n, sign, assignment, round);
      const std::uint64_t outcome = born_sample(state, rng);
      round.outcome.assign(static_cast<std::size_t>(n), '0');
      for (int q = 0; q < n; ++q)
        if ((outcome >> q) & 1) round.outcome[static_cast<std::size_t>(q)] = '1';
      history.push_back(std::move(round));
    }
    const int guessed = strategy.guess(history, assignment, rng);
    if (guessed != 1 && guessed != -1)
      throw ValidationError("strategy returned an invalid sign guess");
    wins[t] = guessed == sign ? 1 : 0;
  });
  DistinguishRecord record;
  record.n = n;
  record.strategy_id = strategy.id();
  record.twirl = twirl;
  record.budget = budget;
  record.trials = trials;
  record.seed = seed;
  for (auto w : wins) record.successes += w;
  return record;
}

// --- shipped strategies --------------------------------------------------------

/// Uniformly random stabilizer-product inputs and uniformly random Pauli
/// bases; guesses by exact maximum likelihood over the transcript.
class RandomPauliMlStrategy final : public Strategy {
 public:
  explicit RandomPauliMlStrategy(int n) : n_(n) {}

  std::string id() const override { return "random-pauli-ml"; }

  MeasurementRound next(const std::vector<MeasurementRound>&, Rng& rng) const override {
    MeasurementRound round;
    std::uniform_int_distribution<int> label(0, kNumStabLabels - 1);
    std::uniform_int_distribution<int> basis(0, 2);
    for (int q = 0; q < n_; ++q) {
      const int l = label(rng);
      round.input.factors.push_back(stab_amps(l));
      round.input.labels.push_back(l);
      round.basis_labels.push_back("XYZ"[basis(rng)]);
    }
    round.rotations = detail::pauli_basis_rotations(round.basis_labels);
    return round;
  }

  int guess(const std::vector<MeasurementRound>& history,
            const std::optional<TwirlAssignment>& twirl, Rng&) const override {
    const double lp = detail::transcript_likelihood(n_, 1, twirl, history);
    const double lm = detail::transcript_likelihood(n_, -1, twirl, history);
    return lp >= lm ? 1 : -1;
  }

 private:
  int n_;
};

/// The special-input one-shot distinguisher: |+>^n with computational
/// readout for odd n; |+>^{n-1} (x) |i> with Z readout on the first n-1
/// qubits and Y on the last for even n. The outputs of the two hypotheses
/// have disjoint parity support, so the (untwirled) guess is exact.
class CleverStrategy final : public Strategy {
 public:
  explicit CleverStrategy(int n) : n_(n) {}

  std::string id() const override { return "clever"; }

  MeasurementRound next(const std::vector<MeasurementRound>&, Rng&) const override {
    MeasurementRound round;
    const bool odd = (n_ % 2) != 0;
    for (int q = 0; q < n_; ++q) {
      const bool last = q == n_ - 1;
      const int l = (!odd && last) ? kPlusI : kPlus;
      round.input.factors.push_back(stab_amps(l));
      round.input.labels.push_back(l);
      round.basis_labels.push_back((!odd && last) ? 'Y' : 'Z');
    }
    round.rotations = detail::pauli_basis_rotations(round.basis_labels);
    return round;
  }

  int guess(const std::vector<MeasurementRound>& history, const std::optional<TwirlAssignment>&,
            Rng&) const override {
    if (history.empty()) throw ValidationError("clever strategy: empty history");
    const auto& outcome = history.front().outcome;
    const bool odd = (n_ % 2) != 0;
    int parity = 0;
    const int counted = odd ? n_ : n_ - 1;
    for (int q = 0; q < counted; ++q)
      if (outcome[static_cast<std::size_t>(q)] == '1') parity ^= 1;
    return parity == 0 ? 1 : -1;
  }

 private:
  int n_;
};

/// Adaptive strategy: scores a pool of random candidate rounds by the
/// posterior-weighted likelihood gap between the two (untwirled)
/// hypotheses and measures the best one; guesses by maximum likelihood.
class GreedyAdaptiveStrategy final : public Strategy {
 public:
  explicit GreedyAdaptiveStrategy(int n, int pool = 8) : n_(n), pool_(pool) {
    if (pool < 1) throw ValidationError("greedy strategy: pool >= 1 required");
  }

  std::string id() const override { return "greedy-adaptive"; }

  MeasurementRound next(const std::vector<MeasurementRound>& history, Rng& rng) const override {
    // posterior over the sign from the untwirled transcript likelihoods
    double lp = detail::transcript_likelihood(n_, 1, std::nullopt, history);
    double lm = detail::transcript_likelihood(n_, -1, std::nullopt, history);
    const double total = lp + lm;
    if (total > 0.0) {
      lp /= total;
      lm /= total;
    } else {
      lp = lm = 0.5;
    }
    RandomPauliMlStrategy sampler(n_);
    MeasurementRound best;
    double best_score = -1.0;
    for (int c = 0; c < pool_; ++c) {
      MeasurementRound cand = sampler.next(history, rng);
      const StateVector plus = detail::simulate_round(n_, 1, std::nullopt, cand);
      const StateVector minus = detail::simulate_round(n_, -1, std::nullopt, cand);
      double score = 0.0;
      for (std::size_t i = 0; i < plus.dim(); ++i)
        score += std::abs(lp * std::norm(plus.amps[i]) - lm * std::norm(minus.amps[i]));
      if (score > best_score) {
        best_score = score;
        best = std::move(cand);
      }
    }
    return best;
  }

  int guess(const std::vector<MeasurementRound>& history,
            const std::optional<TwirlAssignment>& twirl, Rng&) const override {
    const double lp = detail::transcript_likelihood(n_, 1, twirl, history);
    const double lm = detail::transcript_likelihood(n_, -1, twirl, history);
    return lp >= lm ? 1 : -1;
  }

 private:
  int n_;
  int pool_;
};

inline std::unique_ptr<Strategy> clever_distinguisher(int n) {
  return std::make_unique<CleverStrategy>(n);
}

inline std::unique_ptr<Strategy> make_strategy(const std::string& id, int n) {
  if (id == "clever") return std::make_unique<CleverStrategy>(n);
  if (id == "random-pauli-ml") return std::make_unique<RandomPauliMlStrategy>(n);
  if (id == "greedy-adaptive") return std::make_unique<GreedyAdaptiveStrategy>(n);
  throw ValidationError("unknown strategy '" + id + "'");
}

}  // namespace qsl
