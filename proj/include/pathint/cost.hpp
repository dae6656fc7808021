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

#ifndef PATHINT_COST_HPP
#define PATHINT_COST_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <vector>

#include "pathint/errors.hpp"
#include "pathint/reduce.hpp"
#include "pathint/sde.hpp"

/**
 * \file
 * \brief Path costs, importance weights, and the estimators built on them.
 *
 * A path sampled under control u carries the cost
 *
 *   S = Phi(X(t1)) + sum_k [V(t_k, X_k) + 1/2 u_k'u_k] dt + sum_k u_k' dW_k,
 *
 * whose stochastic term is the Girsanov correction for sampling under u. The normalized
 * weight alpha = exp(-S) / mean exp(-S) then turns ensemble averages into averages under
 * the optimally controlled process, whatever u was.
 */

namespace pathint {

/// Cost of one path split into its four parts.
struct CostRecord {
  double terminal = 0.0;
  double running = 0.0;
  double control = 0.0;     ///< 1/2 sum u'u dt
  double stochastic = 0.0;  ///< sum u' dW (left point)
  double total = 0.0;       ///< ((terminal + running) + control) + stochastic
};

namespace detail {

inline void require_same_grid(const PathEnsemble& ensemble, const ControlProblem& problem) {
  if (!(ensemble.grid() == problem.grid) || ensemble.dim_x() != problem.dim_x ||
      ensemble.dim_w() != problem.dim_w) {
    throw InvalidArgument("ensemble grid or dimensions do not match the problem");
  }
}

}  // namespace detail

inline std::vector<CostRecord> path_costs(const PathEnsemble& ensemble,
                                          const ControlProblem& problem) {
  problem.validate();
  detail::require_same_grid(ensemble, problem);
  const TimeGrid& grid = ensemble.grid();
  const double dt = grid.dt();
  const std::size_t n = grid.n_steps();
  std::vector<CostRecord> out(ensemble.n_paths());
  for (std::size_t i = 0; i < ensemble.n_paths(); ++i) {
    CostRecord& c = out[i];
    for (std::size_t k = 0; k < n; ++k) {
      const auto u = ensemble.control(i, k);
      const auto w = ensemble.noise(i, k);
      c.running += problem.running_cost(grid.time(k), ensemble.state(i, k)) * dt;
      double uu = 0.0;
      double uw = 0.0;
      for (std::size_t j = 0; j < u.size(); ++j) {
        uu += u[j] * u[j];
        uw += u[j] * w[j];
      }
      c.control += 0.5 * uu * dt;
      c.stochastic += uw;
    }
    c.terminal = problem.terminal_cost(ensemble.state(i, n));
    c.total = ((c.terminal + c.running) + c.control) + c.stochastic;
    if (std::isnan(c.total) || c.total == -std::numeric_limits<double>::infinity()) {
      throw NonFiniteError(i, n, "path cost");
    }
  }
  return out;
}

inline std::vector<double> totals(std::span<const CostRecord> costs) {
  std::vector<double> s(costs.size());
  std::transform(costs.begin(), costs.end(), s.begin(), [](const CostRecord& c) { return c.total; });
  return s;
}

/// Self-normalized importance weights and their diagnostics.
struct WeightSet {
  std::vector<double> alpha;   ///< mean(alpha) == 1
  double log_normalizer = 0.0; ///< log mean exp(-S)
  double ess_fraction = 1.0;   ///< 1 / mean(alpha^2)
  double variance = 0.0;       ///< mean(alpha^2) - 1
};

namespace detail {

/// log mean exp(-S) over [begin, end), shifted by the largest -S.
inline double log_mean_exp_neg(std::span<const double> s, std::size_t begin, std::size_t end) {
  double shift = -std::numeric_limits<double>::infinity();
  for (std::size_t i = begin; i < end; ++i) {
    shift = std::max(shift, -s[i]);
  }
  if (!std::isfinite(shift)) {
    throw DegenerateEnsembleError();
  }
  const double sum = pairwise_sum(begin, end, [&](std::size_t i) { return std::exp(-s[i] - shift); });
  return shift + std::log(sum / static_cast<double>(end - begin));
}

}  // namespace detail

inline WeightSet weights_from_totals(std::span<const double> s) {
  if (s.empty()) {
    throw InvalidArgument("weights need at least one path");
  }
  WeightSet w;
  const double log_z = detail::log_mean_exp_neg(s, 0, s.size());
  w.log_normalizer = log_z;
  w.alpha.resize(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    w.alpha[i] = std::exp(-s[i] - log_z);
  }
  const double m2 = pairwise_sum(0, s.size(), [&](std::size_t i) { return w.alpha[i] * w.alpha[i]; }) /
                    static_cast<double>(s.size());
  w.ess_fraction = 1.0 / m2;
  w.variance = m2 - 1.0;
  return w;
}

inline WeightSet weights(std::span<const CostRecord> costs) {
  return weights_from_totals(totals(costs));
}

/// J(t0, x0) = -log mean exp(-S); unbiased in the sampling policy up to Monte Carlo error.
inline double value_estimate(std::span<const CostRecord> costs) {
  if (costs.empty()) {
    throw InvalidArgument("value estimate needs at least one path");
  }
  const auto s = totals(costs);
  return -detail::log_mean_exp_neg(s, 0, s.size());
}

/// Plain sample mean of S: the performance of the sampling policy itself.
inline double expected_cost(std::span<const CostRecord> costs) {
  if (costs.empty()) {
    throw InvalidArgument("expected cost needs at least one path");
  }
  return mean(totals(costs));
}

/// Ensemble summary with batch-means standard errors.
struct CostSummary {
  Estimate expected_cost;
  Estimate value;
  Estimate weight_variance;
  Estimate ess_fraction;
  double cost_sd = 0.0;  ///< sample standard deviation of S
  std::size_t n_paths = 0;
};

inline CostSummary summarize(std::span<const CostRecord> costs,
                             std::size_t batches = kDefaultBatches) {
  if (costs.empty()) {
    throw InvalidArgument("summary needs at least one path");
  }
  const auto s = totals(costs);
  const std::size_t n = s.size();
  auto slice_mean = [&](std::size_t b, std::size_t e) {
    return pairwise_sum(b, e, [&](std::size_t i) { return s[i]; }) / static_cast<double>(e - b);
  };
  auto slice_second_moment = [&](std::size_t b, std::size_t e) {
    const double lz = detail::log_mean_exp_neg(s, b, e);
    return pairwise_sum(b, e, [&](std::size_t i) { return std::exp(-2.0 * (s[i] + lz)); }) /
           static_cast<double>(e - b);
  };
  CostSummary out;
  out.n_paths = n;
  out.expected_cost = batched_estimate(n, slice_mean, batches);
  out.value = batched_estimate(
      n, [&](std::size_t b, std::size_t e) { return -detail::log_mean_exp_neg(s, b, e); }, batches);
  out.weight_variance = batched_estimate(
      n, [&](std::size_t b, std::size_t e) { return slice_second_moment(b, e) - 1.0; }, batches);
  out.ess_fraction = batched_estimate(
      n, [&](std::size_t b, std::size_t e) { return 1.0 / slice_second_moment(b, e); }, batches);
  const double m = out.expected_cost.value;
  const double ss = pairwise_sum(0, n, [&](std::size_t i) { return (s[i] - m) * (s[i] - m); });
  out.cost_sd = n > 1 ? std::sqrt(ss / static_cast<double>(n - 1)) : 0.0;
  return out;
}

/// Monte Carlo quadrature of the two weight-variance bounds for a sampler u against u*.
struct VarianceBounds {
  double lower = 0.0;  ///< int ||E[(u* - u) alpha]||^2 dt
  double upper = 0.0;  ///< int E[||u* - u||^2 alpha^2] dt
};

inline VarianceBounds variance_bounds(const PathEnsemble& ensemble, const WeightSet& w,
                                      const Policy& u_star) {
  if (w.alpha.size() != ensemble.n_paths()) {
    throw InvalidArgument("weights do not belong to this ensemble");
  }
  const TimeGrid& grid = ensemble.grid();
  const std::size_t n_paths = ensemble.n_paths();
  const std::size_t m = ensemble.dim_w();
  const double dt = grid.dt();
  std::vector<double> diff(n_paths * m);
  std::vector<double> sq(n_paths);
  std::vector<double> ustar(m);
  VarianceBounds b;
  for (std::size_t k = 0; k < grid.n_steps(); ++k) {
    const double t = grid.time(k);
    for (std::size_t i = 0; i < n_paths; ++i) {
      u_star.evaluate_at_node(k, t, ensemble.state(i, k), ustar);
      const auto u = ensemble.control(i, k);
      double norm2 = 0.0;
      for (std::size_t j = 0; j < m; ++j) {
        const double d = ustar[j] - u[j];
        diff[i * m + j] = d * w.alpha[i];
        norm2 += d * d;
      }
      sq[i] = norm2 * w.alpha[i] * w.alpha[i];
    }
    const auto cross = pairwise_column_sums(diff, n_paths, m);
    double mean_norm2 = 0.0;
    for (double c : cross) {
      const double mc = c / static_cast<double>(n_paths);
      mean_norm2 += mc * mc;
    }
    b.lower += dt * mean_norm2;
    b.upper += dt * mean(sq);
  }
  return b;
}

inline VarianceBounds variance_bounds(const PathEnsemble& ensemble, const ControlProblem& problem,
                                      const Policy& u_star) {
  const auto costs = path_costs(ensemble, problem);
  return variance_bounds(ensemble, weights(costs), u_star);
}

}  // namespace pathint

#endif  // PATHINT_COST_HPP
