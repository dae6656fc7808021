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

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "pathint/gbm.hpp"
#include "pathint/sde.hpp"
#include "support.hpp"

namespace pathint {
namespace {

using testing::constant_problem;
using testing::mean_and_se;

TEST(TimeGrid, LastNodeIsExactlyT1) {
  const TimeGrid g(0.1, 0.7, 3);
  EXPECT_EQ(g.time(3), 0.7);
  EXPECT_DOUBLE_EQ(g.time(1), 0.3);
  EXPECT_EQ(g.node_at(0.1), 0u);
  EXPECT_EQ(g.node_at(0.3), 1u);
  EXPECT_EQ(g.node_at(0.7), 2u);
}

TEST(TimeGrid, RejectsDegenerate) {
  EXPECT_THROW(TimeGrid(1.0, 1.0, 10), InvalidArgument);
  EXPECT_THROW(TimeGrid(0.0, 1.0, 0), InvalidArgument);
  EXPECT_THROW(TimeGrid::with_step(0.0, 1.0, -0.1), InvalidArgument);
  EXPECT_EQ(TimeGrid::with_step(0.0, 1.0, 0.001).n_steps(), 1000u);
}

TEST(Simulate, FrozenDynamicsStayPut) {
  const auto p = constant_problem(0.0, 0.0, 0.0, 0.5);
  const Policy u = AnalyticPolicy{"three", [](double, std::span<const double>, std::span<double> o) {
                                    o[0] = 3.0;
                                  }};
  const auto e = simulate(p, u, 50, 1);
  for (std::size_t i = 0; i < e.n_paths(); ++i) {
    for (std::size_t k = 0; k <= e.n_steps(); ++k) {
      ASSERT_EQ(e.state(i, k)[0], 0.5);
    }
  }
}

TEST(Simulate, ZeroPathsRejected) {
  EXPECT_THROW(simulate(constant_problem(0, 1, 0, 0), Policy::zero(), 0, 1), InvalidArgument);
}

TEST(Simulate, StoresPolicyIdAndInitialState) {
  const auto e = simulate(constant_problem(0, 1, 0, 2.0), Policy::zero(), 10, 1);
  EXPECT_EQ(e.policy_id(), "zero");
  for (std::size_t i = 0; i < 10; ++i) {
    EXPECT_EQ(e.state(i, 0)[0], 2.0);
  }
}

TEST(Simulate, NoiseHasVarianceDt) {
  const auto p = constant_problem(0, 1, 0, 0, 50);
  const auto e = simulate(p, Policy::zero(), 4000, 9);
  std::vector<double> sq;
  for (std::size_t i = 0; i < e.n_paths(); ++i) {
    for (std::size_t k = 0; k < e.n_steps(); ++k) {
      sq.push_back(e.noise(i, k)[0] * e.noise(i, k)[0] / p.grid.dt());
    }
  }
  const auto m = mean_and_se(sq);
  EXPECT_NEAR(m.value, 1.0, 4.0 * m.std_error);
}

TEST(Simulate, BrownianMeanAndCovariance) {
  ControlProblem p;
  p.dim_x = 2;
  p.dim_w = 2;
  p.drift = [](double, std::span<const double>, std::span<double> o) { o[0] = o[1] = 0.0; };
  p.diffusion = [](double, std::span<const double>, std::span<double> o) {
    o[0] = 1.0;
    o[1] = 0.0;
    o[2] = 0.0;
    o[3] = 1.0;
  };
  p.running_cost = [](double, std::span<const double>) { return 0.0; };
  p.terminal_cost = [](std::span<const double>) { return 0.0; };
  p.x0 = {0.3, -0.2};
  p.grid = TimeGrid(0.0, 1.5, 10);
  const std::size_t n = 100000;
  const auto e = simulate(p, Policy::zero(), n, 11);
  std::vector<double> d0(n), d1(n), c00(n), c11(n), c01(n);
  for (std::size_t i = 0; i < n; ++i) {
    d0[i] = e.state(i, 10)[0] - 0.3;
    d1[i] = e.state(i, 10)[1] + 0.2;
    c00[i] = d0[i] * d0[i];
    c11[i] = d1[i] * d1[i];
    c01[i] = d0[i] * d1[i];
  }
  for (const auto* v : {&d0, &d1}) {
    const auto m = mean_and_se(*v);
    EXPECT_NEAR(m.value, 0.0, 4.0 * m.std_error);
  }
  for (const auto* v : {&c00, &c11}) {
    const auto m = mean_and_se(*v);
    EXPECT_NEAR(m.value, 1.5, 4.0 * m.std_error);
  }
  const auto m = mean_and_se(c01);
  EXPECT_NEAR(m.value, 0.0, 4.0 * m.std_error);
}

TEST(Simulate, GbmMeanMatchesClosedForm) {
  gbm::GBMSpec spec;
  spec.log_coordinates = false;
  const auto p = gbm::make_problem(spec);
  const std::size_t n = 100000;
  const auto e = simulate(p, Policy::zero(), n, 5);
  std::vector<double> x1(n);
  for (std::size_t i = 0; i < n; ++i) {
    x1[i] = e.state(i, spec.n_steps)[0];
  }
  const auto m = mean_and_se(x1);
  // E X(1) = x0 e^{1/2}
  EXPECT_NEAR(m.value, 0.5 * std::exp(0.5), 3.0 * m.std_error);
}

TEST(Simulate, BitIdenticalAcrossThreadCounts) {
  const auto p = gbm::make_problem({});
  const auto u = gbm::analytic_control({});
  const auto a = simulate(p, u, 1000, 77, {1});
  const auto b = simulate(p, u, 1000, 77, {3});
  const auto c = simulate(p, u, 1000, 77, {0});
  for (std::size_t i = 0; i < 1000; ++i) {
    for (std::size_t k = 0; k < p.grid.n_steps(); ++k) {
      ASSERT_EQ(a.noise(i, k)[0], b.noise(i, k)[0]);
      ASSERT_EQ(a.control(i, k)[0], b.control(i, k)[0]);
      ASSERT_EQ(a.state(i, k + 1)[0], b.state(i, k + 1)[0]);
      ASSERT_EQ(a.state(i, k + 1)[0], c.state(i, k + 1)[0]);
    }
  }
}

TEST(Simulate, PathsDoNotDependOnEnsembleSize) {
  const auto p = constant_problem(0.1, 0.7, 0, 0, 20);
  const auto small = simulate(p, Policy::zero(), 10, 3);
  const auto large = simulate(p, Policy::zero(), 100, 3);
  for (std::size_t i = 0; i < 10; ++i) {
    EXPECT_EQ(small.state(i, 20)[0], large.state(i, 20)[0]);
  }
}

TEST(Simulate, ReplayReproducesStatesExactly) {
  for (bool log_coords : {true, false}) {
    gbm::GBMSpec spec;
    spec.log_coordinates = log_coords;
    spec.n_steps = 200;
    const auto p = gbm::make_problem(spec);
    const auto e = simulate(p, gbm::perturbed_control(spec, 0.2), 200, 4);
    const auto replay = replay_states(p, e);
    for (std::size_t i = 0; i < e.n_paths(); ++i) {
      for (std::size_t k = 0; k <= e.n_steps(); ++k) {
        ASSERT_EQ(replay[i * (e.n_steps() + 1) + k], e.state(i, k)[0]);
      }
    }
  }
}

TEST(Simulate, StoredControlsMatchPolicy) {
  const gbm::GBMSpec spec;
  const auto u = gbm::analytic_control(spec);
  const auto e = simulate(gbm::make_problem(spec), u, 100, 8);
  EXPECT_EQ(max_control_mismatch(e, u), 0.0);
}

TEST(Simulate, NonFiniteStateNamesPathAndStep) {
  auto p = constant_problem(0, 1, 0, 0.5);
  p.drift = [](double, std::span<const double> x, std::span<double> o) { o[0] = 1.0 / (x[0] - 0.5); };
  try {
    simulate(p, Policy::zero(), 5, 1);
    FAIL() << "expected a non-finite error";
  } catch (const NonFiniteError& e) {
    EXPECT_EQ(e.path(), 0u);
    EXPECT_EQ(e.step(), 1u);
  }
}

TEST(Simulate, NonFiniteControlIsReported) {
  const Policy u = AnalyticPolicy{"nan", [](double, std::span<const double>, std::span<double> o) {
                                    o[0] = std::numeric_limits<double>::quiet_NaN();
                                  }};
  EXPECT_THROW(simulate(constant_problem(0, 1, 0, 0), u, 3, 1, {2}), NonFiniteError);
}

TEST(Simulate, FailureReportIsScheduleIndependent) {
  auto p = constant_problem(0, 1, 0, 0.0, 10);
  // paths whose first increment is large blow up through the drift
  p.drift = [](double, std::span<const double> x, std::span<double> o) {
    o[0] = std::abs(x[0]) > 0.5 ? std::numeric_limits<double>::infinity() : 0.0;
  };
  std::size_t first = 0;
  try {
    simulate(p, Policy::zero(), 400, 2, {1});
  } catch (const NonFiniteError& e) {
    first = e.path();
  }
  for (unsigned threads : {2u, 4u}) {
    try {
      simulate(p, Policy::zero(), 400, 2, {threads});
      FAIL();
    } catch (const NonFiniteError& e) {
      EXPECT_EQ(e.path(), first);
    }
  }
}

TEST(Policy, ParametrizedUsesLeftNode) {
  ParametrizedPolicy pp;
  pp.basis = gbm::polynomial_basis(1);
  pp.grid = TimeGrid(0.0, 1.0, 4);
  pp.dim_u = 1;
  pp.coefficients = {1, 0, 2, 0, 3, 0, 4, 1};
  const Policy u(pp);
  double out = 0.0;
  const double x = 2.0;
  u.evaluate(0.3, std::span<const double>(&x, 1), std::span<double>(&out, 1));
  EXPECT_EQ(out, 2.0);
  u.evaluate(1.0, std::span<const double>(&x, 1), std::span<double>(&out, 1));
  EXPECT_EQ(out, 6.0);
  EXPECT_EQ(u.id(), "parametrized:poly1");
}

TEST(Policy, ParametrizedMustCoverEveryNode) {
  ParametrizedPolicy pp;
  pp.basis = gbm::constant_basis();
  pp.grid = TimeGrid(0.0, 1.0, 4);
  pp.coefficients = {1, 2, 3};
  EXPECT_THROW(Policy{pp}, InvalidArgument);
}

// Weak error of Euler in x: E X_dt(1) = x0 (1 + dt/2)^{1/dt}, so halving dt halves the error.
// Control variates built from the same increments: x0 exp(W) with mean x0 e^{1/2}, and
// x0/2 exp(W) sum (dW^2 - dt) with mean x0/2 e^{1/2} dt.
Estimate euler_weak_error(double dt, std::uint64_t seed) {
  gbm::GBMSpec spec;
  spec.log_coordinates = false;
  spec.n_steps = static_cast<std::size_t>(std::lround(1.0 / dt));
  const auto p = gbm::make_problem(spec);
  const std::size_t n = 100000;
  const auto e = simulate(p, Policy::zero(), n, seed);
  std::vector<double> d(n);
  for (std::size_t i = 0; i < n; ++i) {
    double w = 0.0;
    double q = 0.0;
    for (std::size_t k = 0; k < spec.n_steps; ++k) {
      const double dw = e.noise(i, k)[0];
      w += dw;
      q += dw * dw - dt;
    }
    d[i] = e.state(i, spec.n_steps)[0] - spec.x0 * std::exp(w) * (1.0 - 0.5 * q);
  }
  const auto m = mean_and_se(d);
  return {0.5 * spec.x0 * std::exp(0.5) * dt - m.value, m.std_error};
}

TEST(Simulate, EulerWeakErrorHalvesWithDt) {
  const auto coarse = euler_weak_error(0.05, 21);
  const auto fine = euler_weak_error(0.025, 22);
  EXPECT_NEAR(coarse.value / fine.value, 2.0, 0.5);
  // deterministic reference: 0.5 e^{1/2} - 0.5 (1.025)^20
  EXPECT_NEAR(coarse.value, 0.5 * std::exp(0.5) - 0.5 * std::pow(1.025, 20), 4.0 * coarse.std_error);
}

}  // namespace
}  // namespace pathint
