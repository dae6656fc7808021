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

#ifndef PATHINT_IIS_HPP
#define PATHINT_IIS_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pathint/cost.hpp"
#include "pathint/estimator.hpp"
#include "pathint/rng.hpp"
#include "pathint/sde.hpp"

/**
 * \file
 * \brief Iterative importance sampling: sample under the current controller, refit, repeat.
 */

namespace pathint {

struct IISConfig {
  std::size_t n_paths = 10000;
  std::size_t n_rounds = 2;
  /// A <- (1 - damping) A_old + damping A_new.
  double damping = 1.0;
  std::uint64_t seed = 1;
  FitOptions fit;
  /// Round-0 sampler; the zero policy when unset.
  std::optional<Policy> warm_start;
  /// Paths for the out-of-sample evaluation of the final policy; 0 skips it.
  std::size_t evaluation_paths = 0;
  SimulationOptions simulation;

  void validate() const {
    if (n_rounds == 0) {
      throw InvalidArgument("iterative importance sampling needs at least one round");
    }
    if (!(damping > 0.0 && damping <= 1.0)) {
      throw InvalidArgument("damping must lie in (0, 1]");
    }
    if (n_paths == 0) {
      throw InvalidArgument("n_paths must be positive");
    }
  }
};

/// Diagnostics of one round: the sampler's statistics and the coefficients fitted from it.
struct IterationReport {
  std::size_t round = 0;
  std::string sampler;
  CostSummary summary;
  std::vector<Eigen::MatrixXd> coefficients;

  double expected_cost() const { return summary.expected_cost.value; }
  double weight_variance() const { return summary.weight_variance.value; }
  double ess_fraction() const { return summary.ess_fraction.value; }
  double value_estimate() const { return summary.value.value; }
};

struct IISResult {
  Policy policy;
  std::vector<IterationReport> rounds;
  std::optional<CostSummary> evaluation;  ///< final policy on fresh paths
};

/// A round failed; carries the rounds completed before it and the sampler in use when it did.
class IISAborted : public NumericalError {
 public:
  IISAborted(const std::string& what, std::vector<IterationReport> partial, Policy sampler)
      : NumericalError(what), partial_(std::move(partial)), sampler_(std::move(sampler)) {}
  const std::vector<IterationReport>& partial() const noexcept { return partial_; }
  const Policy& sampler() const noexcept { return sampler_; }

 private:
  std::vector<IterationReport> partial_;
  Policy sampler_;
};

/// Sub-seed of round r; the out-of-sample evaluation uses r = n_rounds.
inline std::uint64_t round_seed(std::uint64_t seed, std::size_t round) {
  return mix_seed(seed, round);
}

inline IISResult run_iis(const ControlProblem& problem, const BasisSet& basis, const BasisSet& f,
                         const IISConfig& config) {
  config.validate();
  problem.validate();
  IISResult result;
  Policy current = config.warm_start.value_or(Policy::zero());
  std::optional<ParametrizedPolicy> previous;
  if (const auto* p = current.parametrized(); p != nullptr && p->basis.size == basis.size &&
                                              p->grid == problem.grid) {
    previous = *p;
  }
  if (current.is_zero()) {
    ParametrizedPolicy z;
    z.basis = basis;
    z.grid = problem.grid;
    z.dim_u = problem.dim_w;
    z.coefficients.assign(problem.grid.n_steps() * problem.dim_w * basis.size, 0.0);
    previous = std::move(z);
  }

  for (std::size_t r = 0; r < config.n_rounds; ++r) {
    IterationReport report;
    report.round = r;
    report.sampler = current.id();
    try {
      const auto ensemble =
          simulate(problem, current, config.n_paths, round_seed(config.seed, r), config.simulation);
      const auto costs = path_costs(ensemble, problem);
      const auto w = weights(costs);
      report.summary = summarize(costs);
      auto fit = fit_feedback(ensemble, w, basis, f, config.fit);
      auto next = to_policy(fit, basis, problem.grid);
      if (previous && config.damping < 1.0) {
        for (std::size_t i = 0; i < next.coefficients.size(); ++i) {
          next.coefficients[i] = (1.0 - config.damping) * previous->coefficients[i] +
                                 config.damping * next.coefficients[i];
        }
        for (std::size_t k = 0; k < fit.coefficients.size(); ++k) {
          const auto a = next.at(k);
          for (Eigen::Index i = 0; i < fit.coefficients[k].rows(); ++i) {
            for (Eigen::Index j = 0; j < fit.coefficients[k].cols(); ++j) {
              fit.coefficients[k](i, j) = a[static_cast<std::size_t>(i) * basis.size +
                                            static_cast<std::size_t>(j)];
            }
          }
        }
      }
      report.coefficients = std::move(fit.coefficients);
      previous = next;
      current = Policy(std::move(next));
    } catch (const NumericalError& e) {
      throw IISAborted("round " + std::to_string(r) + ": " + e.what(), std::move(result.rounds),
                       current);
    }
    result.rounds.push_back(std::move(report));
  }

  if (config.evaluation_paths > 0) {
    try {
      const auto ensemble = simulate(problem, current, config.evaluation_paths,
                                     round_seed(config.seed, config.n_rounds), config.simulation);
      result.evaluation = summarize(path_costs(ensemble, problem));
    } catch (const NumericalError& e) {
      throw IISAborted(std::string("evaluation: ") + e.what(), std::move(result.rounds), current);
    }
  }
  result.policy = std::move(current);
  return result;
}

}  // namespace pathint

#endif  // PATHINT_IIS_HPP
