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
#include <sstream>

#include "pathint/gbm.hpp"
#include "support.hpp"

namespace pathint::gbm {
namespace {

double scalar(const VectorField& f, double t, double x) {
  double out = 0.0;
  const double xs[1] = {x};
  f(t, xs, std::span<double>(&out, 1));
  return out;
}

double control(const Policy& u, double t, double x) {
  double out = 0.0;
  const double xs[1] = {x};
  u.evaluate(t, xs, std::span<double>(&out, 1));
  return out;
}

TEST(GbmProblem, Coefficients) {
  const auto p = make_problem(GBMSpec{});
  EXPECT_EQ(scalar(p.drift, 0.3, 2.0), 1.0);
  EXPECT_EQ(scalar(p.diffusion, 0.3, 2.0), 2.0);
  const double half[1] = {0.5};
  EXPECT_NEAR(p.terminal_cost(half), 5.0 * std::log(2.0) * std::log(2.0), 1e-15);
  EXPECT_NEAR(p.terminal_cost(half), 2.40227, 1e-5);
  EXPECT_EQ(p.running_cost(0.2, half), 0.0);
  EXPECT_TRUE(static_cast<bool>(p.step));
  GBMSpec euler;
  euler.log_coordinates = false;
  EXPECT_FALSE(static_cast<bool>(make_problem(euler).step));
}

TEST(GbmProblem, RejectsInvalidSpec) {
  GBMSpec s;
  s.Q = 0.0;
  EXPECT_THROW(make_problem(s), InvalidArgument);
  s = {};
  s.x0 = -1.0;
  EXPECT_THROW(make_problem(s), InvalidArgument);
}

TEST(GbmClosedForm, OptimalControl) {
  const GBMSpec spec;
  const auto u = analytic_control(spec);
  EXPECT_NEAR(control(u, 0.0, 0.5), 10.0 / 11.0 * std::log(2.0), 1e-14);
  EXPECT_NEAR(control(u, 0.0, 0.5), 0.630, 1e-3);
  EXPECT_NEAR(control(u, 1.0, std::exp(1.0)), -10.0, 1e-12);
  EXPECT_EQ(control(u, 0.5, 1.0), 0.0);
  for (double t : {0.0, 0.37, 1.0}) {
    for (double x : {0.1, 0.5, 1.7}) {
      EXPECT_NEAR(control(u, t, x), testing::ustar(t, x), 1e-13);
    }
  }
  EXPECT_NEAR(control(perturbed_control(spec, 0.25), 0.5, 1.0), 0.5, 1e-15);
  EXPECT_THROW(perturbed_control(spec, -0.1), InvalidArgument);
  EXPECT_EQ(optimal_log_coefficient(spec, 1.0), -10.0);
}

TEST(GbmClosedForm, Value) {
  const GBMSpec spec;
  EXPECT_NEAR(analytic_value(spec, 0.0, 0.5), 1.4173, 1e-4);
  EXPECT_NEAR(analytic_value(spec, 0.0, 1.0), 0.5 * std::log(11.0), 1e-15);
  EXPECT_NEAR(analytic_value(spec, 0.4, 0.8), testing::value(0.4, 0.8), 1e-14);
  EXPECT_THROW(analytic_value(spec, 0.0, 0.0), InvalidArgument);
}

TEST(GbmClosedForm, ValueSolvesHamiltonJacobiBellman) {
  // In y = log x: J_t + 1/2 J_yy - 1/2 J_y^2 = 0 and u* = -J_y.
  const GBMSpec spec;
  const double h = 1e-4;
  for (double t : {0.1, 0.5, 0.9}) {
    for (double y : {-1.2, -0.3, 0.4}) {
      auto J = [&](double tt, double yy) { return analytic_value(spec, tt, std::exp(yy)); };
      const double jt = (J(t + h, y) - J(t - h, y)) / (2 * h);
      const double jy = (J(t, y + h) - J(t, y - h)) / (2 * h);
      const double jyy = (J(t, y + h) - 2 * J(t, y) + J(t, y - h)) / (h * h);
      EXPECT_NEAR(jt + 0.5 * jyy - 0.5 * jy * jy, 0.0, 1e-5);
      EXPECT_NEAR(control(analytic_control(spec), t, std::exp(y)), -jy, 1e-6);
    }
  }
}

TEST(GbmBasis, Evaluations) {
  const double xs[1] = {2.0};
  double out[3];
  polynomial_basis(2).eval(0.0, xs, out);
  EXPECT_EQ(out[0], 1.0);
  EXPECT_EQ(out[1], 2.0);
  EXPECT_EQ(out[2], 4.0);
  log_basis().eval(0.0, xs, out);
  EXPECT_EQ(out[0], std::log(2.0));
  const double bad[1] = {-1.0};
  EXPECT_THROW(log_basis().eval(0.0, bad, out), InvalidArgument);
  EXPECT_EQ(polynomial_basis(2).name, "poly2");
  EXPECT_EQ(constant_basis().size, 1u);
}

TEST(GbmPde, CrankNicolsonMatchesClosedForm) {
  const GBMSpec spec;
  const auto g = pde_oracle(spec);
  double max_u = 0.0;
  double max_j = 0.0;
  for (double t : {0.0, 0.25, 0.5, 0.75, 0.9}) {
    for (double x = 0.2; x <= 2.0 + 1e-12; x += 0.05) {
      const double u = testing::ustar(t, x);
      const double j = testing::value(t, x);
      max_u = std::max(max_u, std::abs(g.control(t, x) - u) / std::max(1.0, std::abs(u)));
      max_j = std::max(max_j, std::abs(g.value(t, x) - j) / std::max(1.0, std::abs(j)));
    }
  }
  EXPECT_LT(max_u, 1e-3);
  EXPECT_LT(max_j, 1e-3);
}

TEST(GbmPde, ImplicitEulerIsFirstOrder) {
  const GBMSpec spec;
  PDEGridParams coarse;
  coarse.scheme = PDEScheme::implicit_euler;
  coarse.n_t = 200;
  PDEGridParams fine = coarse;
  fine.n_t = 400;
  const double e1 = std::abs(pde_oracle(spec, coarse).value(0.0, 0.5) - testing::value(0.0, 0.5));
  const double e2 = std::abs(pde_oracle(spec, fine).value(0.0, 0.5) - testing::value(0.0, 0.5));
  EXPECT_NEAR(e1 / e2, 2.0, 0.3);
}

TEST(GbmPde, ExplicitSchemeChecksStability) {
  PDEGridParams p;
  p.scheme = PDEScheme::explicit_euler;
  EXPECT_THROW(pde_oracle(GBMSpec{}, p), InvalidArgument);
  p.n_y = 201;
  p.n_t = 4000;
  const auto g = pde_oracle(GBMSpec{}, p);
  EXPECT_NEAR(g.value(0.0, 0.5), testing::value(0.0, 0.5), 5e-3);
}

TEST(GbmSampling, LogStateMeanUnderOptimum) {
  const GBMSpec spec;
  const auto p = make_problem(spec);
  const auto e = simulate(p, analytic_control(spec), 20000, 3);
  for (std::size_t k : {250, 500, 1000}) {
    std::vector<double> ys(e.n_paths());
    for (std::size_t i = 0; i < ys.size(); ++i) {
      ys[i] = std::log(e.state(i, k)[0]);
    }
    const auto m = testing::mean_and_se(ys);
    const double t = p.grid.time(k);
    const double exact = std::log(0.5) * (1.0 + 10.0 * (1.0 - t)) / 11.0;
    EXPECT_NEAR(optimal_log_mean(spec, t), exact, 1e-14);
    // the discrete left-point scheme lags the continuous mean by O(dt)
    EXPECT_NEAR(m.value, exact, 4.0 * m.std_error + 5e-3) << "t " << t;
  }
}

TEST(GbmReproduction, Figure1RejectsEpsilonOne) {
  EXPECT_THROW(reproduce_figure1(GBMSpec{}, {0.5, 1.0}, 100, 1), InvalidArgument);
}

TEST(GbmReproduction, Figure1Rows) {
  GBMSpec spec;
  spec.n_steps = 100;
  const auto rows = reproduce_figure1(spec, {0.1, 0.4}, 2000, 1);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[1].bound_lo_analytic, 0.4);
  EXPECT_NEAR(rows[1].bound_hi_analytic, 0.4 / 0.6, 1e-15);
  EXPECT_NEAR(rows[0].lower, 0.1, 1e-9);
  const auto csv = figure1_csv(rows, "# seed: 1\n");
  EXPECT_EQ(csv.rfind("# seed: 1\nepsilon,var,lower,upper,bound_lo_analytic,bound_hi_analytic\n", 0), 0u);
}

TEST(GbmReproduction, Figure2GridAndCsv) {
  GBMSpec spec;
  spec.n_steps = 100;
  Figure2Options opt;
  opt.n_paths = 2000;
  opt.n_rounds = 2;
  opt.fit.nodes_per_interval = 5;
  const auto r = reproduce_figure2(spec, opt);
  ASSERT_EQ(r.controls.size(), 40u);
  EXPECT_EQ(r.controls[19].x, 1.0);
  EXPECT_EQ(r.controls[19].ustar, 0.0);
  EXPECT_EQ(r.controls[19].ulog, 0.0);
  EXPECT_EQ(r.histogram.size(), 40u);
  std::size_t total = 0;
  for (const auto& b : r.histogram) {
    total += b.count;
  }
  EXPECT_EQ(total, 2000u);
  std::istringstream csv(figure2_controls_csv(r));
  std::string header;
  std::getline(csv, header);
  EXPECT_EQ(header, "x,u0,u1,u2,ulog,ustar");
  EXPECT_EQ(figure2_hist_csv(r).rfind("bin_left,bin_right,count\n", 0), 0u);
}

TEST(GbmReproduction, TableCsv) {
  const std::vector<Table1Row> rows = {{"zero", 7.5, 1.9, 0.34, 0.02}};
  EXPECT_EQ(table1_csv(rows), "policy,ES,varalpha,lambda,stderr_ES\nzero,7.5,1.9,0.34,0.02\n");
  EXPECT_EQ(table1_columns().size(), 6u);
  Table1Options none;
  none.seeds.clear();
  EXPECT_THROW(reproduce_table1(GBMSpec{}, none), InvalidArgument);
}

TEST(GbmReproduction, SmallTableIsOrderedAtTheEnds) {
  GBMSpec spec;
  spec.n_steps = 100;
  Table1Options opt;
  opt.n_paths = 2000;
  opt.seeds = {1, 2, 3};
  opt.fit.nodes_per_interval = 5;
  const auto r = reproduce_table1(spec, opt);
  ASSERT_EQ(r.per_seed.size(), 3u);
  ASSERT_EQ(r.median.size(), 6u);
  EXPECT_EQ(r.median.front().policy, "zero");
  EXPECT_GT(r.median.front().expected_cost, r.median.back().expected_cost);
  EXPECT_GT(r.median[4].ess_fraction, r.median[0].ess_fraction);
  EXPECT_GT(r.median.back().ess_fraction, 0.9);
}

}  // namespace
}  // namespace pathint::gbm
