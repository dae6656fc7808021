// Copyright 2026 The pathint Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef PATHINT_SDE_HPP
#define PATHINT_SDE_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <exception>
#include <functional>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

#include "pathint/errors.hpp"
#include "pathint/rng.hpp"

/**
 * \file
 * \brief Controlled diffusions dX = b dt + sigma (u dt + dW) and their Euler-Maruyama simulation.
 */

namespace pathint {

/// Uniform time grid t_k = t0 + k dt, k = 0..n_steps, with t_{n_steps} == t1 exactly.
class TimeGrid {
 public:
  TimeGrid() = default;
  TimeGrid(double t0, double t1, std::size_t n_steps) : t0_(t0), t1_(t1), n_steps_(n_steps) {
    if (!(t1 > t0) || !std::isfinite(t0) || !std::isfinite(t1)) {
      throw InvalidArgument("time grid requires finite t0 < t1");
    }
    if (n_steps == 0) {
      throw InvalidArgument("time grid requires at least one step");
    }
  }

  /// Grid with the step closest to `dt` that divides [t0, t1] evenly.
  static TimeGrid with_step(double t0, double t1, double dt) {
    if (!(dt > 0.0)) {
      throw InvalidArgument("time step must be positive");
    }
    const double steps = std::round((t1 - t0) / dt);
    return TimeGrid(t0, t1, static_cast<std::size_t>(std::max(1.0, steps)));
  }

  double t0() const noexcept { return t0_; }
  double t1() const noexcept { return t1_; }
  std::size_t n_steps() const noexcept { return n_steps_; }
  double dt() const noexcept { return (t1_ - t0_) / static_cast<double>(n_steps_); }

  double time(std::size_t k) const noexcept {
    return k >= n_steps_ ? t1_ : t0_ + static_cast<double>(k) * dt();
  }

  /// Index of the step containing t (left node); t1 maps to the last step.
  std::size_t node_at(double t) const noexcept {
    const double s = (t - t0_) / dt();
    if (!(s > 0.0)) {
      return 0;
    }
    const auto k = static_cast<std::size_t>(std::floor(s + 1e-9));
    return std::min(k, n_steps_ - 1);
  }

  friend bool operator==(const TimeGrid&, const TimeGrid&) = default;

 private:
  double t0_ = 0.0;
  double t1_ = 1.0;
  std::size_t n_steps_ = 1;
};

/// f(t, x) -> out, for vector-valued maps such as drift, controls, and basis functions.
using VectorField = std::function<void(double t, std::span<const double> x, std::span<double> out)>;
/// (t, x) -> scalar.
using ScalarField = std::function<double(double t, std::span<const double> x)>;
/// x -> scalar.
using TerminalField = std::function<double(std::span<const double> x)>;
/// Replacement state update: (t, dt, x, u, dW) -> next.
using StepFunction =
    std::function<void(double t, double dt, std::span<const double> x, std::span<const double> u,
                       std::span<const double> dw, std::span<double> next)>;

/**
 * A path integral control problem:
 *
 *   dX = b(t, X) dt + sigma(t, X) (u dt + dW),
 *   S  = Phi(X(t1)) + int V dt + 1/2 int u'u dt + int u'dW.
 *
 * `diffusion` writes sigma row-major (dim_x rows, dim_w columns). When `step` is set it
 * replaces the Euler-Maruyama update; problems that integrate in transformed coordinates
 * (for instance log-space for geometric Brownian motion) use it.
 */
struct ControlProblem {
  std::size_t dim_x = 1;
  std::size_t dim_w = 1;
  VectorField drift;
  VectorField diffusion;
  ScalarField running_cost;
  TerminalField terminal_cost;
  std::vector<double> x0;
  TimeGrid grid;
  StepFunction step;

  void validate() const {
    if (dim_x == 0 || dim_w == 0) {
      throw InvalidArgument("problem dimensions must be positive");
    }
    if (x0.size() != dim_x) {
      throw InvalidArgument("initial state has " + std::to_string(x0.size()) +
                            " entries, expected " + std::to_string(dim_x));
    }
    if (!step && (!drift || !diffusion)) {
      throw InvalidArgument("problem needs drift and diffusion or a custom step");
    }
    if (!running_cost || !terminal_cost) {
      throw InvalidArgument("problem needs running and terminal costs");
    }
  }
};

/// k feature functions h(t, x) in R^k; used both as control basis and as test functions.
struct BasisSet {
  std::string name;
  std::size_t size = 0;
  VectorField eval;
};

struct ZeroPolicy {};

struct AnalyticPolicy {
  std::string name;
  VectorField control;
};

/// u(t, x) = A(t_k) h(t, x) with A held at the left grid node.
struct ParametrizedPolicy {
  BasisSet basis;
  TimeGrid grid;
  std::size_t dim_u = 1;
  /// Node-major; each node holds dim_u x basis.size() entries, row-major.
  std::vector<double> coefficients;

  std::span<const double> at(std::size_t node) const {
    const std::size_t block = dim_u * basis.size;
    return std::span<const double>(coefficients).subspan(node * block, block);
  }

  void validate() const {
    if (basis.size == 0 || !basis.eval) {
      throw InvalidArgument("parametrized policy needs a non-empty basis");
    }
    if (coefficients.size() != grid.n_steps() * dim_u * basis.size) {
      throw InvalidArgument("parametrized policy coefficients must cover every grid node");
    }
  }
};

class Policy {
 public:
  Policy() = default;
  Policy(ZeroPolicy p) : impl_(p) {}  // NOLINT(google-explicit-constructor)
  Policy(AnalyticPolicy p) : impl_(std::move(p)) {}  // NOLINT(google-explicit-constructor)
  Policy(ParametrizedPolicy p) : impl_(std::move(p)) {  // NOLINT(google-explicit-constructor)
    std::get<ParametrizedPolicy>(impl_).validate();
  }

  static Policy zero() { return Policy(ZeroPolicy{}); }

  std::string id() const {
    return std::visit(
        [](const auto& p) -> std::string {
          using T = std::decay_t<decltype(p)>;
          if constexpr (std::is_same_v<T, ZeroPolicy>) {
            return "zero";
          } else if constexpr (std::is_same_v<T, AnalyticPolicy>) {
            return p.name;
          } else {
            return "parametrized:" + p.basis.name;
          }
        },
        impl_);
  }

  bool is_zero() const noexcept { return std::holds_alternative<ZeroPolicy>(impl_); }
  const ParametrizedPolicy* parametrized() const noexcept {
    return std::get_if<ParametrizedPolicy>(&impl_);
  }

  /// Control at grid node `node` (time t = t_node) and state x.
  void evaluate_at_node(std::size_t node, double t, std::span<const double> x,
                        std::span<double> out) const {
    std::visit(
        [&](const auto& p) {
          using T = std::decay_t<decltype(p)>;
          if constexpr (std::is_same_v<T, ZeroPolicy>) {
            std::fill(out.begin(), out.end(), 0.0);
          } else if constexpr (std::is_same_v<T, AnalyticPolicy>) {
            p.control(t, x, out);
          } else {
            evaluate_parametrized(p, std::min(node, p.grid.n_steps() - 1), t, x, out);
          }
        },
        impl_);
  }

  /// Control at an arbitrary time; parametrized policies use the left node's coefficients.
  void evaluate(double t, std::span<const double> x, std::span<double> out) const {
    const auto* p = parametrized();
    evaluate_at_node(p != nullptr ? p->grid.node_at(t) : 0, t, x, out);
  }

 private:
  static void evaluate_parametrized(const ParametrizedPolicy& p, std::size_t node, double t,
                                    std::span<const double> x, std::span<double> out) {
    constexpr std::size_t kInline = 32;
    std::array<double, kInline> inline_buf{};
    std::vector<double> heap_buf;
    std::span<double> h;
    if (p.basis.size <= kInline) {
      h = std::span<double>(inline_buf.data(), p.basis.size);
    } else {
      heap_buf.resize(p.basis.size);
      h = heap_buf;
    }
    p.basis.eval(t, x, h);
    const auto a = p.at(node);
    for (std::size_t r = 0; r < p.dim_u; ++r) {
      double acc = 0.0;
      for (std::size_t c = 0; c < p.basis.size; ++c) {
        acc += a[r * p.basis.size + c] * h[c];
      }
      out[r] = acc;
    }
  }

  std::variant<ZeroPolicy, AnalyticPolicy, ParametrizedPolicy> impl_;
};

/**
 * N simulated paths with their Brownian increments and the controls applied at each step.
 * Immutable after construction.
 */
class PathEnsemble {
 public:
  PathEnsemble(TimeGrid grid, std::size_t n_paths, std::size_t dim_x, std::size_t dim_w,
               std::string policy_id, std::vector<double> states, std::vector<double> noise,
               std::vector<double> controls)
      : grid_(grid),
        n_paths_(n_paths),
        dim_x_(dim_x),
        dim_w_(dim_w),
        policy_id_(std::move(policy_id)),
        states_(std::move(states)),
        noise_(std::move(noise)),
        controls_(std::move(controls)) {
    const std::size_t n = grid_.n_steps();
    if (states_.size() != n_paths_ * (n + 1) * dim_x_ || noise_.size() != n_paths_ * n * dim_w_ ||
        controls_.size() != n_paths_ * n * dim_w_) {
      throw InvalidArgument("path ensemble arrays do not match its shape");
    }
  }

  const TimeGrid& grid() const noexcept { return grid_; }
  std::size_t n_paths() const noexcept { return n_paths_; }
  std::size_t n_steps() const noexcept { return grid_.n_steps(); }
  std::size_t dim_x() const noexcept { return dim_x_; }
  std::size_t dim_w() const noexcept { return dim_w_; }
  const std::string& policy_id() const noexcept { return policy_id_; }

  /// X_i(t_k), k = 0..n_steps.
  std::span<const double> state(std::size_t path, std::size_t k) const {
    return std::span<const double>(states_).subspan((path * (n_steps() + 1) + k) * dim_x_, dim_x_);
  }
  /// Delta W_{i,k} ~ N(0, dt I), k = 0..n_steps-1.
  std::span<const double> noise(std::size_t path, std::size_t k) const {
    return std::span<const double>(noise_).subspan((path * n_steps() + k) * dim_w_, dim_w_);
  }
  /// u(t_k, X_{i,k}) as applied during simulation.
  std::span<const double> control(std::size_t path, std::size_t k) const {
    return std::span<const double>(controls_).subspan((path * n_steps() + k) * dim_w_, dim_w_);
  }

 private:
  TimeGrid grid_;
  std::size_t n_paths_;
  std::size_t dim_x_;
  std::size_t dim_w_;
  std::string policy_id_;
  std::vector<double> states_;
  std::vector<double> noise_;
  std::vector<double> controls_;
};

struct SimulationOptions {
  /// Worker threads; 0 uses the hardware concurrency.
  unsigned threads = 1;
};

namespace detail {

inline bool all_finite(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [](double a) { return std::isfinite(a); });
}

/// One Euler-Maruyama (or custom) update, shared by simulation and replay.
class Stepper {
 public:
  explicit Stepper(const ControlProblem& problem)
      : problem_(problem),
        drift_(problem.dim_x),
        sigma_(problem.dim_x * problem.dim_w),
        kick_(problem.dim_w) {}

  void operator()(double t, double dt, std::span<const double> x, std::span<const double> u,
                  std::span<const double> dw, std::span<double> next) {
    if (problem_.step) {
      problem_.step(t, dt, x, u, dw, next);
      return;
    }
    problem_.drift(t, x, drift_);
    problem_.diffusion(t, x, sigma_);
    const std::size_t n = problem_.dim_x;
    const std::size_t m = problem_.dim_w;
    for (std::size_t j = 0; j < m; ++j) {
      kick_[j] = u[j] * dt + dw[j];
    }
    for (std::size_t r = 0; r < n; ++r) {
      double acc = x[r] + drift_[r] * dt;
      for (std::size_t j = 0; j < m; ++j) {
        acc += sigma_[r * m + j] * kick_[j];
      }
      next[r] = acc;
    }
  }

 private:
  const ControlProblem& problem_;
  std::vector<double> drift_;
  std::vector<double> sigma_;
  std::vector<double> kick_;
};

}  // namespace detail

/**
 * Simulates `n_paths` trajectories of the controlled SDE under `policy`.
 *
 * X_{k+1} = X_k + b(t_k, X_k) dt + sigma(t_k, X_k) (u(t_k, X_k) dt + dW_k), with dW_k drawn
 * from the counter-based stream keyed by (seed, path, step). The result is bit-identical
 * for any thread count.
 */
inline PathEnsemble simulate(const ControlProblem& problem, const Policy& policy,
                             std::size_t n_paths, std::uint64_t seed,
                             SimulationOptions options = {}) {
  problem.validate();
  if (n_paths == 0) {
    throw InvalidArgument("simulate requires at least one path");
  }
  const TimeGrid& grid = problem.grid;
  const std::size_t n = grid.n_steps();
  const std::size_t dx = problem.dim_x;
  const std::size_t dw = problem.dim_w;
  const double dt = grid.dt();
  const double sqrt_dt = std::sqrt(dt);

  std::vector<double> states(n_paths * (n + 1) * dx);
  std::vector<double> noise(n_paths * n * dw);
  std::vector<double> controls(n_paths * n * dw);
  const NormalStream stream(seed);

  auto run_paths = [&](std::size_t begin, std::size_t end) {
    detail::Stepper step(problem);
    for (std::size_t i = begin; i < end; ++i) {
      double* xs = states.data() + i * (n + 1) * dx;
      double* ws = noise.data() + i * n * dw;
      double* us = controls.data() + i * n * dw;
      std::copy(problem.x0.begin(), problem.x0.end(), xs);
      for (std::size_t k = 0; k < n; ++k) {
        const double t = grid.time(k);
        const std::span<const double> x(xs + k * dx, dx);
        const std::span<double> u(us + k * dw, dw);
        const std::span<double> w(ws + k * dw, dw);
        policy.evaluate_at_node(k, t, x, u);
        if (!detail::all_finite(u)) {
          throw NonFiniteError(i, k, "control");
        }
        stream.fill(i, k, w);
        for (double& z : w) {
          z *= sqrt_dt;
        }
        const std::span<double> next(xs + (k + 1) * dx, dx);
        step(t, dt, x, u, w, next);
        if (!detail::all_finite(next)) {
          throw NonFiniteError(i, k + 1, "state");
        }
      }
    }
  };

  unsigned workers = options.threads == 0 ? std::max(1u, std::thread::hardware_concurrency())
                                          : options.threads;
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, n_paths));
  if (workers <= 1) {
    run_paths(0, n_paths);
  } else {
    // Report the failure with the lowest path index so errors are schedule-independent.
    std::mutex mu;
    std::optional<std::pair<std::size_t, std::exception_ptr>> failure;
    {
      std::vector<std::jthread> pool;
      pool.reserve(workers);
      for (unsigned w = 0; w < workers; ++w) {
        const std::size_t begin = n_paths * w / workers;
        const std::size_t end = n_paths * (w + 1) / workers;
        pool.emplace_back([&, begin, end] {
          try {
            run_paths(begin, end);
          } catch (...) {
            const std::lock_guard lock(mu);
            if (!failure || begin < failure->first) {
              failure.emplace(begin, std::current_exception());
            }
          }
        });
      }
    }
    if (failure) {
      std::rethrow_exception(failure->second);
    }
  }
  return PathEnsemble(grid, n_paths, dx, dw, policy.id(), std::move(states), std::move(noise),
                      std::move(controls));
}

/// Re-runs the state recursion from the stored increments and controls.
inline std::vector<double> replay_states(const ControlProblem& problem,
                                         const PathEnsemble& ensemble) {
  problem.validate();
  const std::size_t n = ensemble.n_steps();
  const std::size_t dx = ensemble.dim_x();
  std::vector<double> states(ensemble.n_paths() * (n + 1) * dx);
  detail::Stepper step(problem);
  const double dt = ensemble.grid().dt();
  for (std::size_t i = 0; i < ensemble.n_paths(); ++i) {
    double* xs = states.data() + i * (n + 1) * dx;
    std::copy(problem.x0.begin(), problem.x0.end(), xs);
    for (std::size_t k = 0; k < n; ++k) {
      step(ensemble.grid().time(k), dt, std::span<const double>(xs + k * dx, dx),
           ensemble.control(i, k), ensemble.noise(i, k), std::span<double>(xs + (k + 1) * dx, dx));
    }
  }
  return states;
}

/// Largest |u_stored - policy(t_k, X_k)| over the ensemble.
inline double max_control_mismatch(const PathEnsemble& ensemble, const Policy& policy) {
  std::vector<double> u(ensemble.dim_w());
  double worst = 0.0;
  for (std::size_t i = 0; i < ensemble.n_paths(); ++i) {
    for (std::size_t k = 0; k < ensemble.n_steps(); ++k) {
      policy.evaluate_at_node(k, ensemble.grid().time(k), ensemble.state(i, k), u);
      const auto stored = ensemble.control(i, k);
      for (std::size_t j = 0; j < u.size(); ++j) {
        worst = std::max(worst, std::abs(stored[j] - u[j]));
      }
    }
  }
  return worst;
}

}  // namespace pathint

#endif  // PATHINT_SDE_HPP
