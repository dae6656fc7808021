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

#ifndef PATHINT_GBM_HPP
#define PATHINT_GBM_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "pathint/cost.hpp"
#include "pathint/estimator.hpp"
#include "pathint/iis.hpp"
#include "pathint/sde.hpp"

/**
 * \file
 * \brief Geometric Brownian motion benchmark with a known optimal controller.
 *
 *   dX = X (dt/2 + u dt + dW),   S = Q/2 log(X(t1))^2 + 1/2 int u^2 dt + int u dW.
 *
 * In y = log x this is dy = u dt + dW with terminal cost Q/2 y^2, a scalar LQ problem with
 *
 *   u*(t, x) = -P(t) log x,  P(t) = Q / (1 + Q (t1 - t)),
 *   J(t, x)  = 1/2 P(t) (log x)^2 + 1/2 log(1 + Q (t1 - t)).
 */

namespace pathint::gbm {

struct GBMSpec {
  double Q = 10.0;
  double x0 = 0.5;
  double t0 = 0.0;
  double t1 = 1.0;
  std::size_t n_steps = 1000;
  /// Integrate exactly in log coordinates; false uses plain Euler-Maruyama in x.
  bool log_coordinates = true;

  TimeGrid grid() const { return TimeGrid(t0, t1, n_steps); }

  void validate() const {
    if (!(Q > 0.0) || !std::isfinite(Q)) {
      throw InvalidArgument("GBM benchmark requires Q > 0");
    }
    if (!(x0 > 0.0) || !std::isfinite(x0)) {
      throw InvalidArgument("GBM benchmark requires x0 > 0");
    }
    (void)grid();
  }
};

/// Riccati gain P(t) of the log-space LQ problem.
inline double riccati_gain(const GBMSpec& spec, double t) {
  return spec.Q / (1.0 + spec.Q * (spec.t1 - t));
}

/// Coefficient a(t) of the optimal controller in the basis {log x}.
inline double optimal_log_coefficient(const GBMSpec& spec, double t) {
  return -riccati_gain(spec, t);
}

namespace detail {

inline double checked_log(double x) {
  if (!(x > 0.0)) {
    throw InvalidArgument("GBM state must be positive, got " + std::to_string(x));
  }
  return std::log(x);
}

}  // namespace detail

inline ControlProblem make_problem(const GBMSpec& spec) {
  spec.validate();
  ControlProblem p;
  p.dim_x = 1;
  p.dim_w = 1;
  p.drift = [](double, std::span<const double> x, std::span<double> out) { out[0] = 0.5 * x[0]; };
  p.diffusion = [](double, std::span<const double> x, std::span<double> out) { out[0] = x[0]; };
  p.running_cost = [](double, std::span<const double>) { return 0.0; };
  const double q = spec.Q;
  p.terminal_cost = [q](std::span<const double> x) {
    // x <= 0 is reachable only by Euler in x; the resulting NaN is reported by path_costs.
    const double y = std::log(x[0]);
    return 0.5 * q * y * y;
  };
  p.x0 = {spec.x0};
  p.grid = spec.grid();
  if (spec.log_coordinates) {
    // d log X = u dt + dW exactly when u is held over the step.
    p.step = [](double, double dt, std::span<const double> x, std::span<const double> u,
                std::span<const double> dw, std::span<double> next) {
      next[0] = x[0] * std::exp(u[0] * dt + dw[0]);
    };
  }
  return p;
}

inline Policy analytic_control(const GBMSpec& spec) {
  spec.validate();
  return AnalyticPolicy{"analytic", [spec](double t, std::span<const double> x, std::span<double> out) {
                          out[0] = -riccati_gain(spec, t) * detail::checked_log(x[0]);
                        }};
}

/// u*(t, x) + sqrt(epsilon).
inline Policy perturbed_control(const GBMSpec& spec, double epsilon) {
  spec.validate();
  if (!(epsilon >= 0.0)) {
    throw InvalidArgument("epsilon must be non-negative");
  }
  const double shift = std::sqrt(epsilon);
  return AnalyticPolicy{"analytic+sqrt(" + std::to_string(epsilon) + ")",
                        [spec, shift](double t, std::span<const double> x, std::span<double> out) {
                          out[0] = -riccati_gain(spec, t) * detail::checked_log(x[0]) + shift;
                        }};
}

inline double analytic_value(const GBMSpec& spec, double t, double x) {
  spec.validate();
  const double y = detail::checked_log(x);
  return 0.5 * riccati_gain(spec, t) * y * y + 0.5 * std::log(1.0 + spec.Q * (spec.t1 - t));
}

/// Mean of log X(t) under the optimal controller: m' = -P m, m(t0) = log x0.
inline double optimal_log_mean(const GBMSpec& spec, double t) {
  return std::log(spec.x0) * (1.0 + spec.Q * (spec.t1 - t)) / (1.0 + spec.Q * (spec.t1 - spec.t0));
}

inline BasisSet constant_basis() {
  return {"const", 1, [](double, std::span<const double>, std::span<double> out) { out[0] = 1.0; }};
}

/// {1, x, ..., x^degree}.
inline BasisSet polynomial_basis(std::size_t degree) {
  return {"poly" + std::to_string(degree), degree + 1,
          [degree](double, std::span<const double> x, std::span<double> out) {
            double p = 1.0;
            for (std::size_t j = 0; j <= degree; ++j) {
              out[j] = p;
              p *= x[0];
            }
          }};
}

inline BasisSet log_basis() {
  return {"log", 1, [](double, std::span<const double> x, std::span<double> out) {
            out[0] = detail::checked_log(x[0]);
          }};
}

// ---------------------------------------------------------------------------------------
// Finite-difference oracle for the linear backward equation in y = log x:
//   psi_t + 1/2 psi_yy = 0,  psi(t1, y) = exp(-Q y^2 / 2),
// with u* = d/dy log psi and J = -log psi.

enum class PDEScheme { crank_nicolson, implicit_euler, explicit_euler };

struct PDEGridParams {
  double y_min = -6.0;
  double y_max = 6.0;
  std::size_t n_y = 2001;
  std::size_t n_t = 1000;
  PDEScheme scheme = PDEScheme::crank_nicolson;
};

struct PDEGrid {
  double y_min = 0.0;
  double y_max = 0.0;
  std::size_t n_y = 0;
  std::size_t n_t = 0;
  double t0 = 0.0;
  double t1 = 0.0;
  /// psi at time slice s (t = t0 + s (t1 - t0) / n_t) and node j, row-major by slice.
  std::vector<double> psi;

  double dy() const { return (y_max - y_min) / static_cast<double>(n_y - 1); }
  double y(std::size_t j) const { return y_min + static_cast<double>(j) * dy(); }
  double time(std::size_t slice) const {
    return slice == n_t ? t1 : t0 + static_cast<double>(slice) * (t1 - t0) / static_cast<double>(n_t);
  }
  std::size_t slice_at(double t) const {
    const double s = std::round((t - t0) / (t1 - t0) * static_cast<double>(n_t));
    return static_cast<std::size_t>(std::clamp(s, 0.0, static_cast<double>(n_t)));
  }
  double at(std::size_t slice, std::size_t j) const { return psi[slice * n_y + j]; }

  /// log psi and its y-derivative at y, from the quadratic through the three nearest nodes.
  std::pair<double, double> log_psi(std::size_t slice, double yq) const {
    const double h = dy();
    auto c = static_cast<std::ptrdiff_t>(std::llround((yq - y_min) / h));
    c = std::clamp<std::ptrdiff_t>(c, 1, static_cast<std::ptrdiff_t>(n_y) - 2);
    const auto j = static_cast<std::size_t>(c);
    const double lm = std::log(at(slice, j - 1));
    const double l0 = std::log(at(slice, j));
    const double lp = std::log(at(slice, j + 1));
    const double s = (yq - y(j)) / h;
    const double d1 = (lp - lm) / (2.0 * h);
    const double d2 = (lp - 2.0 * l0 + lm) / (h * h);
    return {l0 + d1 * s * h + 0.5 * d2 * s * s * h * h, d1 + d2 * s * h};
  }

  double value(double t, double x) const { return -log_psi(slice_at(t), std::log(x)).first; }
  double control(double t, double x) const { return log_psi(slice_at(t), std::log(x)).second; }
};

namespace detail {

/// Solves a tridiagonal system with constant off-diagonals in place (Thomas algorithm).
inline void solve_tridiagonal(double lower, double diag, double upper, std::vector<double>& rhs,
                              std::vector<double>& scratch) {
  const std::size_t n = rhs.size();
  scratch.resize(n);
  scratch[0] = upper / diag;
  rhs[0] /= diag;
  for (std::size_t i = 1; i < n; ++i) {
    const double denom = diag - lower * scratch[i - 1];
    scratch[i] = upper / denom;
    rhs[i] = (rhs[i] - lower * rhs[i - 1]) / denom;
  }
  for (std::size_t i = n - 1; i-- > 0;) {
    rhs[i] -= scratch[i] * rhs[i + 1];
  }
}

}  // namespace detail

inline PDEGrid pde_oracle(const GBMSpec& spec, const PDEGridParams& params = {}) {
  spec.validate();
  if (params.n_y < 5 || params.n_t < 1 || !(params.y_max > params.y_min)) {
    throw InvalidArgument("PDE grid needs y_min < y_max, n_y >= 5 and n_t >= 1");
  }
  PDEGrid g{params.y_min, params.y_max, params.n_y, params.n_t, spec.t0, spec.t1, {}};
  const double h = g.dy();
  const double tau = (spec.t1 - spec.t0) / static_cast<double>(params.n_t);
  const double r = 0.5 * tau / (h * h);  // psi_tau = 1/2 psi_yy
  if (params.scheme == PDEScheme::explicit_euler && 2.0 * r > 1.0) {
    throw InvalidArgument("explicit scheme violates the CFL bound dt <= dy^2 (dt = " +
                          std::to_string(tau) + ", dy^2 = " + std::to_string(h * h) +
                          "); use a smaller time step or an implicit scheme");
  }
  const std::size_t ny = params.n_y;
  g.psi.assign((params.n_t + 1) * ny, 0.0);
  auto exact = [&](double t, double y) {
    return std::exp(-0.5 * riccati_gain(spec, t) * y * y - 0.5 * std::log(1.0 + spec.Q * (spec.t1 - t)));
  };
  for (std::size_t j = 0; j < ny; ++j) {
    const double y = g.y(j);
    g.psi[params.n_t * ny + j] = std::exp(-0.5 * spec.Q * y * y);
  }

  const double theta = params.scheme == PDEScheme::crank_nicolson ? 0.5
                       : params.scheme == PDEScheme::implicit_euler ? 1.0
                                                                     : 0.0;
  std::vector<double> interior(ny - 2);
  std::vector<double> scratch;
  for (std::size_t s = params.n_t; s-- > 0;) {
    const double* prev = g.psi.data() + (s + 1) * ny;
    double* next = g.psi.data() + s * ny;
    const double t = g.time(s);
    const double left = exact(t, g.y(0));
    const double right = exact(t, g.y(ny - 1));
    for (std::size_t j = 1; j + 1 < ny; ++j) {
      interior[j - 1] =
          prev[j] + (1.0 - theta) * r * (prev[j - 1] - 2.0 * prev[j] + prev[j + 1]);
    }
    if (theta > 0.0) {
      interior.front() += theta * r * left;
      interior.back() += theta * r * right;
      detail::solve_tridiagonal(-theta * r, 1.0 + 2.0 * theta * r, -theta * r, interior, scratch);
    }
    next[0] = left;
    next[ny - 1] = right;
    std::copy(interior.begin(), interior.end(), next + 1);
  }
  return g;
}

// ---------------------------------------------------------------------------------------
// Reproduction of the benchmark table and figures.

inline std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

struct Table1Row {
  std::string policy;
  double expected_cost = 0.0;
  double weight_variance = 0.0;
  double ess_fraction = 0.0;
  double stderr_expected_cost = 0.0;
};

struct Table1Options {
  std::size_t n_paths = 10000;
  std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5};
  std::size_t n_rounds = 2;
  double damping = 1.0;
  FitOptions fit{std::nullopt, 1e-8, 20, CorrectionEstimator::centered};
  SimulationOptions simulation;
};

/// A column whose sampler diverged for one seed.
struct Table1Failure {
  std::uint64_t seed = 0;
  std::string policy;
  std::string message;
};

/// A diverged run enters the medians as E[S] = Var = +inf and lambda = 0.
struct Table1Result {
  std::vector<std::vector<Table1Row>> per_seed;  ///< [seed][column]
  std::vector<Table1Row> median;
  std::vector<std::pair<std::string, Policy>> fitted;  ///< controllers fitted with the first seed
  std::vector<Table1Failure> failures;
};

/// Column labels in table order.
inline const std::vector<std::string>& table1_columns() {
  static const std::vector<std::string> cols = {"zero", "u0", "u1", "u2", "log", "ustar"};
  return cols;
}

/// The four parametrized columns with their bases.
inline std::vector<std::pair<std::string, BasisSet>> table1_bases() {
  return {{"u0", constant_basis()}, {"u1", polynomial_basis(1)}, {"u2", polynomial_basis(2)},
          {"log", log_basis()}};
}

namespace detail {

inline Table1Row to_row(const std::string& name, const CostSummary& s) {
  return {name, s.expected_cost.value, s.weight_variance.value, s.ess_fraction.value,
          s.expected_cost.std_error};
}

inline Table1Row diverged_row(const std::string& name) {
  const double inf = std::numeric_limits<double>::infinity();
  return {name, inf, inf, 0.0, inf};
}

inline double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace detail

inline Table1Result reproduce_table1(const GBMSpec& spec, const Table1Options& options) {
  if (options.seeds.empty()) {
    throw InvalidArgument("table reproduction needs at least one seed");
  }
  const auto problem = make_problem(spec);
  const auto ustar = analytic_control(spec);
  Table1Result out;
  for (std::size_t si = 0; si < options.seeds.size(); ++si) {
    const std::uint64_t seed = options.seeds[si];
    std::vector<Table1Row> rows;
    {
      const auto e = simulate(problem, Policy::zero(), options.n_paths, mix_seed(seed, 100),
                              options.simulation);
      rows.push_back(detail::to_row("zero", summarize(path_costs(e, problem))));
    }
    std::uint64_t salt = 101;
    for (const auto& [name, basis] : table1_bases()) {
      IISConfig cfg;
      cfg.n_paths = options.n_paths;
      cfg.n_rounds = options.n_rounds;
      cfg.damping = options.damping;
      cfg.seed = mix_seed(seed, salt++);
      cfg.fit = options.fit;
      cfg.evaluation_paths = options.n_paths;
      cfg.simulation = options.simulation;
      try {
        auto result = run_iis(problem, basis, basis, cfg);
        rows.push_back(detail::to_row(name, *result.evaluation));
        if (si == 0) {
          out.fitted.emplace_back(name, std::move(result.policy));
        }
      } catch (const IISAborted& e) {
        rows.push_back(detail::diverged_row(name));
        out.failures.push_back({seed, name, e.what()});
        if (si == 0 && e.sampler().parametrized() != nullptr) {
          out.fitted.emplace_back(name, e.sampler());
        }
      }
    }
    {
      const auto e = simulate(problem, ustar, options.n_paths, mix_seed(seed, 105), options.simulation);
      rows.push_back(detail::to_row("ustar", summarize(path_costs(e, problem))));
    }
    out.per_seed.push_back(std::move(rows));
  }
  for (std::size_t c = 0; c < table1_columns().size(); ++c) {
    Table1Row row;
    row.policy = table1_columns()[c];
    auto column = [&](auto field) {
      std::vector<double> v;
      for (const auto& rows : out.per_seed) {
        v.push_back(rows[c].*field);
      }
      return detail::median_of(std::move(v));
    };
    row.expected_cost = column(&Table1Row::expected_cost);
    row.weight_variance = column(&Table1Row::weight_variance);
    row.ess_fraction = column(&Table1Row::ess_fraction);
    row.stderr_expected_cost = column(&Table1Row::stderr_expected_cost);
    out.median.push_back(row);
  }
  return out;
}

inline std::string table1_csv(const std::vector<Table1Row>& rows, const std::string& preamble = "") {
  std::ostringstream os;
  os << preamble << "policy,ES,varalpha,lambda,stderr_ES\n";
  for (const auto& r : rows) {
    os << r.policy << ',' << format_number(r.expected_cost) << ',' << format_number(r.weight_variance)
       << ',' << format_number(r.ess_fraction) << ',' << format_number(r.stderr_expected_cost) << '\n';
  }
  return os.str();
}

struct Figure1Row {
  double epsilon = 0.0;
  double variance = 0.0;
  double variance_stderr = 0.0;
  double lower = 0.0;  ///< Monte Carlo lower bound
  double upper = 0.0;  ///< Monte Carlo upper bound
  double bound_lo_analytic = 0.0;
  double bound_hi_analytic = 0.0;
};

inline std::vector<Figure1Row> reproduce_figure1(const GBMSpec& spec,
                                                 const std::vector<double>& epsilons,
                                                 std::size_t n_paths, std::uint64_t seed,
                                                 SimulationOptions simulation = {}) {
  for (double e : epsilons) {
    if (!(e >= 0.0 && e < 1.0)) {
      throw InvalidArgument("epsilon must lie in [0, 1); the upper bound diverges at 1");
    }
  }
  const auto problem = make_problem(spec);
  const auto ustar = analytic_control(spec);
  std::vector<Figure1Row> rows;
  for (std::size_t i = 0; i < epsilons.size(); ++i) {
    const double eps = epsilons[i];
    const auto ensemble =
        simulate(problem, perturbed_control(spec, eps), n_paths, mix_seed(seed, 200 + i), simulation);
    const auto costs = path_costs(ensemble, problem);
    const auto w = weights(costs);
    const auto summary = summarize(costs);
    const auto bounds = variance_bounds(ensemble, w, ustar);
    rows.push_back({eps, w.variance, summary.weight_variance.std_error, bounds.lower, bounds.upper,
                    eps, eps / (1.0 - eps)});
  }
  return rows;
}

inline std::string figure1_csv(const std::vector<Figure1Row>& rows, const std::string& preamble = "") {
  std::ostringstream os;
  os << preamble << "epsilon,var,lower,upper,bound_lo_analytic,bound_hi_analytic\n";
  for (const auto& r : rows) {
    os << format_number(r.epsilon) << ',' << format_number(r.variance) << ','
       << format_number(r.lower) << ',' << format_number(r.upper) << ','
       << format_number(r.bound_lo_analytic) << ',' << format_number(r.bound_hi_analytic) << '\n';
  }
  return os.str();
}

struct Figure2Options {
  std::size_t n_paths = 10000;
  /// The zero-policy pass plus two importance-sampling passes.
  std::size_t n_rounds = 3;
  std::uint64_t seed = 1;
  double t = 0.5;
  std::size_t histogram_bins = 40;
  FitOptions fit{std::nullopt, 1e-8, 20, CorrectionEstimator::centered};
  SimulationOptions simulation;
};

struct Figure2Result {
  struct ControlRow {
    double x = 0.0;
    double u0 = 0.0;
    double u1 = 0.0;
    double u2 = 0.0;
    double ulog = 0.0;
    double ustar = 0.0;
  };
  struct Bin {
    double left = 0.0;
    double right = 0.0;
    std::size_t count = 0;
  };
  std::vector<ControlRow> controls;
  std::vector<Bin> histogram;
  double log_coefficient = 0.0;  ///< fitted a(t) of the log basis
  Estimate log_state_mean;       ///< mean of log X^{u*}(t)
  /// Columns whose iteration diverged; their curve is the last controller fitted before it.
  std::vector<std::string> diverged;
};

/// Evaluation grid x = i / 20, i = 1..40.
inline std::vector<double> figure2_x_grid() {
  std::vector<double> xs;
  for (int i = 1; i <= 40; ++i) {
    xs.push_back(static_cast<double>(i) / 20.0);
  }
  return xs;
}

/// Fitted controllers keyed by column name ("u0", "u1", "u2", "log"); missing ones are fitted.
inline Figure2Result reproduce_figure2(const GBMSpec& spec, const Figure2Options& options,
                                       std::vector<std::pair<std::string, Policy>> fitted = {}) {
  const auto problem = make_problem(spec);
  const auto ustar = analytic_control(spec);
  std::uint64_t salt = 300;
  std::vector<std::string> diverged;
  for (const auto& [name, basis] : table1_bases()) {
    const bool have = std::any_of(fitted.begin(), fitted.end(),
                                  [&](const auto& p) { return p.first == name; });
    if (!have) {
      IISConfig cfg;
      cfg.n_paths = options.n_paths;
      cfg.n_rounds = options.n_rounds;
      cfg.seed = mix_seed(options.seed, salt);
      cfg.fit = options.fit;
      cfg.simulation = options.simulation;
      try {
        fitted.emplace_back(name, run_iis(problem, basis, basis, cfg).policy);
      } catch (const IISAborted& e) {
        if (e.sampler().parametrized() == nullptr) {
          throw;
        }
        fitted.emplace_back(name, e.sampler());
        diverged.push_back(name);
      }
    }
    ++salt;
  }
  auto policy_named = [&](const std::string& name) -> const Policy& {
    for (const auto& p : fitted) {
      if (p.first == name) {
        return p.second;
      }
    }
    throw InvalidArgument("missing fitted controller " + name);
  };

  Figure2Result out;
  out.diverged = std::move(diverged);
  const double t = options.t;
  auto eval = [&](const Policy& p, double x) {
    double u = 0.0;
    const double xs[1] = {x};
    p.evaluate(t, xs, std::span<double>(&u, 1));
    return u;
  };
  for (double x : figure2_x_grid()) {
    out.controls.push_back({x, eval(policy_named("u0"), x), eval(policy_named("u1"), x),
                            eval(policy_named("u2"), x), eval(policy_named("log"), x), eval(ustar, x)});
  }
  const auto* log_fit = policy_named("log").parametrized();
  out.log_coefficient = log_fit->at(log_fit->grid.node_at(t))[0];

  const auto ensemble =
      simulate(problem, ustar, options.n_paths, mix_seed(options.seed, 310), options.simulation);
  const auto k = static_cast<std::size_t>(std::clamp(
      std::round((t - spec.t0) / problem.grid.dt()), 0.0, static_cast<double>(spec.n_steps)));
  std::vector<double> xs(ensemble.n_paths());
  std::vector<double> ys(ensemble.n_paths());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    xs[i] = ensemble.state(i, k)[0];
    ys[i] = std::log(xs[i]);
  }
  out.log_state_mean = batched_estimate(ys.size(), [&](std::size_t b, std::size_t e) {
    return pairwise_sum(b, e, [&](std::size_t i) { return ys[i]; }) / static_cast<double>(e - b);
  });
  const auto [lo_it, hi_it] = std::minmax_element(xs.begin(), xs.end());
  const double lo = *lo_it;
  const double hi = *hi_it;
  const std::size_t bins = std::max<std::size_t>(1, options.histogram_bins);
  const double width = (hi - lo) / static_cast<double>(bins);
  out.histogram.resize(bins);
  for (std::size_t b = 0; b < bins; ++b) {
    out.histogram[b].left = lo + static_cast<double>(b) * width;
    out.histogram[b].right = b + 1 == bins ? hi : lo + static_cast<double>(b + 1) * width;
  }
  for (double x : xs) {
    auto b = width > 0.0 ? static_cast<std::size_t>((x - lo) / width) : 0;
    ++out.histogram[std::min(b, bins - 1)].count;
  }
  return out;
}

inline std::string figure2_controls_csv(const Figure2Result& r, const std::string& preamble = "") {
  std::ostringstream os;
  os << preamble << "x,u0,u1,u2,ulog,ustar\n";
  for (const auto& c : r.controls) {
    os << format_number(c.x) << ',' << format_number(c.u0) << ',' << format_number(c.u1) << ','
       << format_number(c.u2) << ',' << format_number(c.ulog) << ',' << format_number(c.ustar) << '\n';
  }
  return os.str();
}

inline std::string figure2_hist_csv(const Figure2Result& r, const std::string& preamble = "") {
  std::ostringstream os;
  os << preamble << "bin_left,bin_right,count\n";
  for (const auto& b : r.histogram) {
    os << format_number(b.left) << ',' << format_number(b.right) << ',' << b.count << '\n';
  }
  return os.str();
}

}  // namespace pathint::gbm

#endif  // PATHINT_GBM_HPP
