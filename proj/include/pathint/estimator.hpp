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

#ifndef PATHINT_ESTIMATOR_HPP
#define PATHINT_ESTIMATOR_HPP

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "pathint/cost.hpp"
#include "pathint/errors.hpp"
#include "pathint/reduce.hpp"
#include "pathint/sde.hpp"

/**
 * \file
 * \brief Weighted path averages, optimal-control corrections, and feedback fits.
 *
 * With <Y>(t) = E[alpha Y(t)], the optimal control u* satisfies for any test function f
 *
 *   <(u* - u) f'>(t) = lim_{r -> t} < int_t^r dW f' > / (r - t),
 *
 * and if u* = A(t) h(t, x) this becomes the linear system
 *
 *   A(t) <h f'>(t) = <u f'>(t) + lim_{r -> t} < int_t^r dW f' > / (r - t)
 *
 * which is solved per time node (or per pooled interval of nodes).
 */

namespace pathint {

/// How the single-step quotient <dW f'>/dt is averaged.
enum class CorrectionEstimator {
  /// mean_i alpha_i dW_ik f_ik' / dt.
  weighted,
  /// mean_i (alpha_i - 1) dW_ik f_ik' / dt. Same expectation, because dW_k is independent
  /// of the state at t_k; the variance vanishes as the sampler approaches u*.
  centered,
};

namespace detail {

inline void require_weights(const PathEnsemble& ensemble, const WeightSet& w) {
  if (w.alpha.size() != ensemble.n_paths()) {
    throw InvalidArgument("weights do not belong to this ensemble");
  }
}

inline void require_node(const PathEnsemble& ensemble, std::size_t k, bool allow_last) {
  const std::size_t limit = allow_last ? ensemble.n_steps() : ensemble.n_steps() - 1;
  if (k > limit) {
    throw InvalidArgument("time node " + std::to_string(k) + " out of range [0, " +
                          std::to_string(limit) + "]");
  }
}

inline double correction_weight(CorrectionEstimator e, double alpha) {
  return e == CorrectionEstimator::centered ? alpha - 1.0 : alpha;
}

}  // namespace detail

/// <f>(t_k) = mean_i alpha_i f(t_k, X_ik); k may be the final node.
inline std::vector<double> weighted_average(const PathEnsemble& ensemble, const WeightSet& w,
                                            const BasisSet& f, std::size_t k) {
  detail::require_weights(ensemble, w);
  detail::require_node(ensemble, k, true);
  const std::size_t n = ensemble.n_paths();
  const std::size_t l = f.size;
  const double t = ensemble.grid().time(k);
  std::vector<double> rows(n * l);
  for (std::size_t i = 0; i < n; ++i) {
    const std::span<double> row(rows.data() + i * l, l);
    f.eval(t, ensemble.state(i, k), row);
    for (double& v : row) {
      v *= w.alpha[i];
    }
  }
  auto sums = pairwise_column_sums(rows, n, l);
  for (double& s : sums) {
    s /= static_cast<double>(n);
  }
  return sums;
}

/// <(u* - u) f'>(t_k) estimated by the single-step quotient; an m x l matrix.
inline Eigen::MatrixXd control_correction(const PathEnsemble& ensemble, const WeightSet& w,
                                          const BasisSet& f, std::size_t k,
                                          CorrectionEstimator estimator = CorrectionEstimator::weighted) {
  detail::require_weights(ensemble, w);
  detail::require_node(ensemble, k, false);
  const std::size_t n = ensemble.n_paths();
  const std::size_t m = ensemble.dim_w();
  const std::size_t l = f.size;
  const double t = ensemble.grid().time(k);
  const double inv_dt = 1.0 / ensemble.grid().dt();
  std::vector<double> fx(l);
  std::vector<double> rows(n * m * l);
  for (std::size_t i = 0; i < n; ++i) {
    f.eval(t, ensemble.state(i, k), fx);
    const auto dw = ensemble.noise(i, k);
    const double a = detail::correction_weight(estimator, w.alpha[i]) * inv_dt;
    for (std::size_t r = 0; r < m; ++r) {
      for (std::size_t c = 0; c < l; ++c) {
        rows[(i * m + r) * l + c] = a * dw[r] * fx[c];
      }
    }
  }
  const auto sums = pairwise_column_sums(rows, n, m * l);
  Eigen::MatrixXd out(m, l);
  for (std::size_t r = 0; r < m; ++r) {
    for (std::size_t c = 0; c < l; ++c) {
      out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          sums[r * l + c] / static_cast<double>(n);
    }
  }
  return out;
}

/// Weighted cross moments at every node k = 0..n_steps-1.
struct MomentSeries {
  std::vector<Eigen::MatrixXd> hf;          ///< <h f'>, k_basis x l
  std::vector<Eigen::MatrixXd> uf;          ///< <u f'>, m x l
  std::vector<Eigen::MatrixXd> correction;  ///< <dW f'>/dt, m x l
};

inline MomentSeries moment_series(const PathEnsemble& ensemble, const WeightSet& w,
                                  const BasisSet& basis, const BasisSet& f,
                                  CorrectionEstimator estimator) {
  detail::require_weights(ensemble, w);
  const std::size_t n = ensemble.n_paths();
  const std::size_t m = ensemble.dim_w();
  const std::size_t kb = basis.size;
  const std::size_t l = f.size;
  const std::size_t width = kb * l + 2 * m * l;
  const double inv_dt = 1.0 / ensemble.grid().dt();
  std::vector<double> hx(kb);
  std::vector<double> fx(l);
  std::vector<double> rows(n * width);
  MomentSeries out;
  const std::size_t steps = ensemble.n_steps();
  out.hf.reserve(steps);
  out.uf.reserve(steps);
  out.correction.reserve(steps);
  for (std::size_t k = 0; k < steps; ++k) {
    const double t = ensemble.grid().time(k);
    for (std::size_t i = 0; i < n; ++i) {
      const auto x = ensemble.state(i, k);
      basis.eval(t, x, hx);
      f.eval(t, x, fx);
      const auto u = ensemble.control(i, k);
      const auto dw = ensemble.noise(i, k);
      const double a = w.alpha[i];
      const double ac = detail::correction_weight(estimator, a) * inv_dt;
      double* row = rows.data() + i * width;
      for (std::size_t c = 0; c < l; ++c) {
        const double af = a * fx[c];
        for (std::size_t r = 0; r < kb; ++r) {
          row[r * l + c] = hx[r] * af;
        }
        for (std::size_t r = 0; r < m; ++r) {
          row[kb * l + r * l + c] = u[r] * af;
          row[kb * l + m * l + r * l + c] = ac * dw[r] * fx[c];
        }
      }
    }
    const auto sums = pairwise_column_sums(rows, n, width);
    const double inv_n = 1.0 / static_cast<double>(n);
    auto block = [&](std::size_t offset, std::size_t r_count) {
      Eigen::MatrixXd mat(static_cast<Eigen::Index>(r_count), static_cast<Eigen::Index>(l));
      for (std::size_t r = 0; r < r_count; ++r) {
        for (std::size_t c = 0; c < l; ++c) {
          mat(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
              sums[offset + r * l + c] * inv_n;
        }
      }
      return mat;
    };
    out.hf.push_back(block(0, kb));
    out.uf.push_back(block(kb * l, m));
    out.correction.push_back(block(kb * l + m * l, m));
  }
  return out;
}

struct FitOptions {
  /// Absolute ridge added to the normal matrix; overrides `relative_ridge` when set.
  std::optional<double> ridge;
  /// Ridge as a multiple of trace(normal matrix) / k_basis, per interval.
  double relative_ridge = 1e-8;
  /// Consecutive grid nodes sharing one coefficient matrix; 1 solves every node separately.
  std::size_t nodes_per_interval = 1;
  CorrectionEstimator estimator = CorrectionEstimator::weighted;
};

/// Time-indexed feedback gains A(t_k) for u = A(t) h(t, x).
struct FitResult {
  std::size_t dim_u = 0;
  std::size_t k_basis = 0;
  std::vector<Eigen::MatrixXd> coefficients;  ///< one m x k_basis matrix per node
  std::vector<double> min_singular_value;     ///< of the regularized normal matrix, per node
  std::vector<double> ridge;                  ///< ridge used, per node
  std::size_t nodes_per_interval = 1;
};

inline constexpr double kSingularThreshold = 1e-12;

/**
 * Solves A_j (sum G_k G_k' + ridge I) = sum (U_k + D_k) G_k' for each interval j of
 * `nodes_per_interval` grid nodes, with G = <h f'>, U = <u f'>, D = <dW f'>/dt.
 */
inline FitResult fit_feedback(const MomentSeries& moments, FitOptions options = {}) {
  const std::size_t steps = moments.hf.size();
  if (steps == 0 || moments.uf.size() != steps || moments.correction.size() != steps) {
    throw InvalidArgument("moment series is empty or inconsistent");
  }
  if ((options.ridge && !(*options.ridge >= 0.0)) || !(options.relative_ridge >= 0.0)) {
    throw InvalidArgument("ridge must be non-negative");
  }
  if (options.nodes_per_interval == 0) {
    throw InvalidArgument("nodes_per_interval must be at least 1");
  }
  const auto kb = moments.hf.front().rows();
  const auto l = moments.hf.front().cols();
  const auto m = moments.uf.front().rows();
  if (l < kb) {
    throw InvalidArgument("need at least as many test functions (" + std::to_string(l) +
                          ") as basis functions (" + std::to_string(kb) + ")");
  }
  FitResult out;
  out.dim_u = static_cast<std::size_t>(m);
  out.k_basis = static_cast<std::size_t>(kb);
  out.nodes_per_interval = options.nodes_per_interval;
  out.coefficients.resize(steps);
  out.min_singular_value.resize(steps);
  out.ridge.resize(steps);

  for (std::size_t begin = 0; begin < steps; begin += options.nodes_per_interval) {
    const std::size_t end = std::min(steps, begin + options.nodes_per_interval);
    Eigen::MatrixXd normal = Eigen::MatrixXd::Zero(kb, kb);
    Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(m, kb);
    for (std::size_t k = begin; k < end; ++k) {
      const auto& g = moments.hf[k];
      normal.noalias() += g * g.transpose();
      rhs.noalias() += (moments.uf[k] + moments.correction[k]) * g.transpose();
    }
    const double ridge = options.ridge.value_or(options.relative_ridge * normal.trace() / static_cast<double>(kb));
    normal.diagonal().array() += ridge;
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(normal, Eigen::EigenvaluesOnly);
    const double smin = eig.eigenvalues().minCoeff();
    if (!(smin >= kSingularThreshold) && ridge == 0.0) {
      throw SingularFitError(begin, smin, "use a positive ridge");
    }
    if (!(smin > 0.0)) {
      throw SingularFitError(begin, smin, "the basis is degenerate on the sampled paths");
    }
    // A normal = rhs  <=>  normal' A' = rhs'
    const Eigen::MatrixXd a = normal.ldlt().solve(rhs.transpose()).transpose();
    if (!a.allFinite()) {
      throw SingularFitError(begin, smin, "solve produced non-finite coefficients");
    }
    for (std::size_t k = begin; k < end; ++k) {
      out.coefficients[k] = a;
      out.min_singular_value[k] = smin;
      out.ridge[k] = ridge;
    }
  }
  return out;
}

inline FitResult fit_feedback(const PathEnsemble& ensemble, const WeightSet& w,
                              const BasisSet& basis, const BasisSet& f, FitOptions options = {}) {
  if (f.size < basis.size) {
    throw InvalidArgument("need at least as many test functions as basis functions");
  }
  return fit_feedback(moment_series(ensemble, w, basis, f, options.estimator), options);
}

/// Policy u = A(t_k) h(t, x) from fitted coefficients.
inline ParametrizedPolicy to_policy(const FitResult& fit, const BasisSet& basis,
                                    const TimeGrid& grid) {
  if (fit.coefficients.size() != grid.n_steps() || fit.k_basis != basis.size) {
    throw InvalidArgument("fit does not match basis or grid");
  }
  ParametrizedPolicy p;
  p.basis = basis;
  p.grid = grid;
  p.dim_u = fit.dim_u;
  p.coefficients.reserve(grid.n_steps() * fit.dim_u * fit.k_basis);
  for (const auto& a : fit.coefficients) {
    for (Eigen::Index r = 0; r < a.rows(); ++r) {
      for (Eigen::Index c = 0; c < a.cols(); ++c) {
        p.coefficients.push_back(a(r, c));
      }
    }
  }
  return p;
}

}  // namespace pathint

#endif  // PATHINT_ESTIMATOR_HPP
