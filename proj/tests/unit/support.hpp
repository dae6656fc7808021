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

#ifndef PATHINT_TESTS_SUPPORT_HPP
#define PATHINT_TESTS_SUPPORT_HPP

#include <cmath>
#include <span>
#include <vector>

#include "pathint/reduce.hpp"
#include "pathint/sde.hpp"

namespace pathint::testing {

/// Constant-coefficient scalar problem: b, sigma, V constant, Phi = 0 unless given.
inline ControlProblem constant_problem(double b, double sigma, double v, double x0,
                                       std::size_t n_steps = 100) {
  ControlProblem p;
  p.drift = [b](double, std::span<const double>, std::span<double> out) { out[0] = b; };
  p.diffusion = [sigma](double, std::span<const double>, std::span<double> out) { out[0] = sigma; };
  p.running_cost = [v](double, std::span<const double>) { return v; };
  p.terminal_cost = [](std::span<const double>) { return 0.0; };
  p.x0 = {x0};
  p.grid = TimeGrid(0.0, 1.0, n_steps);
  return p;
}

/// Sample mean and its plain standard error.
inline Estimate mean_and_se(std::span<const double> v) {
  const double n = static_cast<double>(v.size());
  double m = 0.0;
  for (double a : v) {
    m += a;
  }
  m /= n;
  double ss = 0.0;
  for (double a : v) {
    ss += (a - m) * (a - m);
  }
  return {m, std::sqrt(ss / (n - 1.0) / n)};
}

// Closed forms of the GBM benchmark, written out here rather than taken from the library.
inline double riccati(double t) { return 10.0 / (1.0 + 10.0 * (1.0 - t)); }
inline double ustar(double t, double x) { return -riccati(t) * std::log(x); }
inline double value(double t, double x) {
  const double y = std::log(x);
  return 0.5 * riccati(t) * y * y + 0.5 * std::log(1.0 + 10.0 * (1.0 - t));
}

}  // namespace pathint::testing

#endif  // PATHINT_TESTS_SUPPORT_HPP
