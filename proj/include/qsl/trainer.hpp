// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstdint>
#include <deque>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "qsl/common.hpp"
#include "qsl/costs.hpp"

namespace qsl {

struct TrainConfig {
  int max_iters = 200;
  double grad_step = 1e-5;
  double converge_tol = 1e-9;  // on cost decrease, over converge_window iterations
  int converge_window = 5;
  int memory = 10;             // quasi-Newton history length
  double armijo_c = 1e-4;
  int max_backtracks = 30;
  std::vector<double> init;    // explicit initial point; empty = uniform(-1,1)
  int num_params = 0;          // used when init is empty
  std::uint64_t seed = 0;

  void validate() const {
    if (max_iters < 1) throw ValidationError("TrainConfig: max_iters >= 1 required");
    if (grad_step <= 0.0) throw ValidationError("TrainConfig: grad_step must be positive");
    if (init.empty() && num_params < 1)
      throw ValidationError("TrainConfig: need init vector or num_params");
  }

  std::vector<double> initial_point() const {
    if (!init.empty()) return init;
    Rng rng = make_rng(seed);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    std::vector<double> theta(static_cast<std::size_t>(num_params));
    for (auto& t : theta) t = unif(rng);
    return theta;
  }
};

struct TrainTrace {
  struct Iteration {
    int iter = 0;
    double train_cost = 0.0;
    std::optional<double> test_cost;
    double grad_norm = 0.0;
  };
  std::vector<Iteration> iterations;
  std::vector<double> final_params;
  bool converged = false;
};

using CostFn = std::function<double(const std::vector<double>&)>;

/// Central finite differences. The costs in this library are deterministic
/// functions of theta once snapshots are fixed, so the differences are
/// noise-free.
inline std::vector<double> gradient(const CostFn& cost, const std::vector<double>& params,
                                    double h) {
  if (h <= 0.0) throw ValidationError("gradient: step must be positive");
  std::vector<double> g(params.size(), 0.0);
  std::vector<std::vector<double>> shifted(2 * params.size(), params);
  for (std::size_t i = 0; i < params.size(); ++i) {
    shifted[2 * i][i] += h;
    shifted[2 * i + 1][i] -= h;
  }
  std::vector<double> values(2 * params.size(), 0.0);
  parallel_for(shifted.size(), [&](std::size_t i) { values[i] = cost(shifted[i]); });
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double plus = values[2 * i];
    const double minus = values[2 * i + 1];
    if (!std::isfinite(plus) || !std::isfinite(minus))
      throw NumericError("gradient: non-finite cost value");
    g[i] = (plus - minus) / (2.0 * h);
  }
  return g;
}

namespace detail {

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm2(const std::vector<double>& a) { return std::sqrt(dot(a, a)); }

}  // namespace detail

/// Limited-memory quasi-Newton descent with Armijo backtracking. Accepted
/// costs are strictly non-increasing; the run is deterministic given
/// (cost, config). `on_iteration` is called once per recorded point with
/// (iter, params, train_cost, grad_norm).
inline std::pair<std::vector<double>, TrainTrace> minimize(
    const CostFn& cost, const TrainConfig& config,
    const std::function<void(int, const std::vector<double>&, double, double)>& on_iteration =
        nullptr) {
  config.validate();
  std::vector<double> theta = config.initial_point();
  const std::size_t dim = theta.size();

  TrainTrace trace;
  double f = cost(theta);
  if (!std::isfinite(f)) throw NumericError("minimize: non-finite initial cost");
  std::vector<double> g = gradient(cost, theta, config.grad_step);

  std::deque<std::vector<double>> s_hist, y_hist;
  std::deque<double> rho_hist;

  auto record = [&](int iter) {
    TrainTrace::Iteration row;
    row.iter = iter;
    row.train_cost = f;
    row.grad_norm = detail::norm2(g);
    trace.iterations.push_back(row);
    if (on_iteration) on_iteration(iter, theta, f, row.grad_norm);
  };
  record(0);

  for (int iter = 1; iter <= config.max_iters; ++iter) {
    // two-loop recursion for d = -H g
    std::vector<double> d = g;
    std::vector<double> alpha(s_hist.size(), 0.0);
    for (std::size_t idx = s_hist.size(); idx-- > 0;) {
      alpha[idx] = rho_hist[idx] * detail::dot(s_hist[idx], d);
      for (std::size_t i = 0; i < dim; ++i) d[i] -= alpha[idx] * y_hist[idx][i];
    }
    if (!s_hist.empty()) {
      const double scale = detail::dot(s_hist.back(), y_hist.back()) /
                           detail::dot(y_hist.back(), y_hist.back());
      for (auto& v : d) v *= scale;
    }
    for (std::size_t idx = 0; idx < s_hist.size(); ++idx) {
      const double beta = rho_hist[idx] * detail::dot(y_hist[idx], d);
      for (std::size_t i = 0; i < dim; ++i) d[i] += (alpha[idx] - beta) * s_hist[idx][i];
    }
    for (auto& v : d) v = -v;

    double slope = detail::dot(g, d);
    if (slope >= 0.0) {  // fall back to steepest descent
      for (std::size_t i = 0; i < dim; ++i) d[i] = -g[i];
      slope = -detail::dot(g, g);
    }
    if (slope == 0.0) {
      trace.converged = true;
      break;
    }

    double step = 1.0;
    double f_new = std::numeric_limits<double>::infinity();
    std::vector<double> theta_new(dim);
    bool accepted = false;
    for (int bt = 0; bt <= config.max_backtracks; ++bt) {
      for (std::size_t i = 0; i < dim; ++i) theta_new[i] = theta[i] + step * d[i];
      f_new = cost(theta_new);
      if (std::isfinite(f_new) && f_new <= f + config.armijo_c * step * slope) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      trace.converged = false;
      break;  // line search exhausted: return best-so-far
    }

    std::vector<double> g_new = gradient(cost, theta_new, config.grad_step);
    std::vector<double> s(dim), y(dim);
    for (std::size_t i = 0; i < dim; ++i) {
      s[i] = theta_new[i] - theta[i];
      y[i] = g_new[i] - g[i];
    }
    const double sy = detail::dot(s, y);
    if (sy > 1e-12) {
      s_hist.push_back(std::move(s));
      y_hist.push_back(std::move(y));
      rho_hist.push_back(1.0 / sy);
      if (static_cast<int>(s_hist.size()) > config.memory) {
        s_hist.pop_front();
        y_hist.pop_front();
        rho_hist.pop_front();
      }
    }
    theta = std::move(theta_new);
    const double decrease = f - f_new;
    f = f_new;
    g = std::move(g_new);
    record(iter);

    // converged when the decrease stays below tol for a full window
    if (static_cast<int>(trace.iterations.size()) > config.converge_window) {
      bool flat = decrease < config.converge_tol;
      const std::size_t count = trace.iterations.size();
      for (int w = 0; flat && w < config.converge_window - 1; ++w) {
        const double a = trace.iterations[count - 2 - static_cast<std::size_t>(w)].train_cost;
        const double b = trace.iterations[count - 1 - static_cast<std::size_t>(w)].train_cost;
        flat = (a - b) < config.converge_tol;
      }
      if (flat) {
        trace.converged = true;
        break;
      }
    }
  }

  trace.final_params = theta;
  return {theta, trace};
}

/// Trains the model against the shadow-estimated local cost. The optional
/// diagnostic callback computes an out-of-protocol test metric per
/// iteration; it never feeds into the optimizer.
inline TrainTrace train_incoherent(
    const std::vector<ShadowSet>& shadows, const Circuit& ansatz,
    const std::vector<ProductState>& inputs, TrainConfig config, int batches = 10,
    const std::function<double(const std::vector<double>&)>& diagnostic = nullptr) {
  if (config.init.empty()) config.num_params = ansatz.num_params;
  CostFn cost = [&](const std::vector<double>& theta) {
    return local_cost_from_shadows(shadows, ansatz, theta, inputs, batches).value;
  };
  std::vector<double> test_costs;
  auto on_iter = [&](int, const std::vector<double>& theta, double, double) {
    if (diagnostic) test_costs.push_back(diagnostic(theta));
  };
  auto [theta, trace] = minimize(cost, config, on_iter);
  if (diagnostic) {
    for (std::size_t i = 0; i < trace.iterations.size() && i < test_costs.size(); ++i)
      trace.iterations[i].test_cost = test_costs[i];
  }
  return trace;
}

/// Evaluates all candidates against one fixed cost (typically a
/// shadow-estimated cost with the snapshots shared across candidates) and
/// returns the argmin; ties break toward the lowest index.
inline std::pair<std::size_t, double> covering_search(
    const std::function<double(std::size_t)>& cost_at, std::size_t num_candidates) {
  if (num_candidates == 0) throw ValidationError("covering_search: no candidates");
  std::vector<double> values(num_candidates, 0.0);
  parallel_for(num_candidates, [&](std::size_t i) { values[i] = cost_at(i); });
  std::size_t best = 0;
  for (std::size_t i = 1; i < num_candidates; ++i)
    if (values[i] < values[best]) best = i;
  return {best, values[best]};
}

}  // namespace qsl
