// Copyright 2026 The etopt Authors
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

#include <doctest.h>

#include <random>

#include "etopt/dynamics.hpp"
#include "etopt/scenarios.hpp"
#include "test_util.hpp"

using namespace etopt;
using etopt_test::case1_problem;

namespace {

ProblemInstance single_agent(double d_value) {
  ConstraintSystem cs;
  cs.C = Eigen::MatrixXd::Constant(1, 1, 1.0);
  cs.d = Eigen::VectorXd::Constant(1, d_value);
  cs.normalized = true;
  return ProblemInstance({ScalarObjective::Quadratic(1.0)}, std::move(cs));
}

double lyap(const ProblemInstance& p, const PrimalDualState& s, const KktSolution& kkt) {
  const Eigen::VectorXd g = primal_field(p, s.y, s.mu);
  const Eigen::VectorXd w = dual_field(p.constraints(), s.y);
  return 0.5 * g.squaredNorm() + 0.5 * w.squaredNorm() +
         0.5 * (s.y - kkt.y_star).squaredNorm() + 0.5 * (s.mu - kkt.mu_star).squaredNorm();
}

}  // namespace

TEST_CASE("primal field: hand evaluation and equilibrium") {
  auto p = single_agent(0.0);
  Eigen::VectorXd y1 = Eigen::VectorXd::Constant(1, 1.0);
  Eigen::VectorXd mu0 = Eigen::VectorXd::Zero(1);
  CHECK(primal_field(p, y1, mu0)[0] == doctest::Approx(-3.0).epsilon(1e-14));

  auto c1 = case1_problem();
  auto kkt = kkt_solve(c1);
  CHECK(primal_field(c1, kkt.y_star, kkt.mu_star).norm() < 1e-8);
  CHECK(dual_field(c1.constraints(), kkt.y_star).norm() < 1e-8);
}

TEST_CASE("primal field: componentwise sums match the matrix form") {
  auto p = case1_problem();
  const auto& cs = p.constraints();
  Eigen::VectorXd y(4), mu(4);
  y << 1, 0, 0, 1;
  mu.setZero();
  const Eigen::VectorXd g = primal_field(p, y, mu);
  // Independent componentwise evaluation of the double sums.
  for (int i = 0; i < 4; ++i) {
    double gi = -p.objective(i).gradient(y[i]);
    for (int k = 0; k < 4; ++k) {
      double row = -cs.d[k];
      for (int j = 0; j < 4; ++j) row += cs.C(k, j) * y[j];
      gi -= row * cs.C(k, i);
    }
    for (int l = 0; l < 4; ++l) gi -= mu[l] * cs.C(l, i);
    CHECK(g[i] == doctest::Approx(gi).epsilon(1e-13));
  }
}

TEST_CASE("dual field examples") {
  auto p = case1_problem();
  auto kkt = kkt_solve(p);
  CHECK(dual_field(p.constraints(), kkt.y_star).norm() < 1e-10);

  ConstraintSystem cs;
  cs.C = Eigen::MatrixXd::Ones(1, 2);
  cs.d = Eigen::VectorXd::Ones(1);
  Eigen::VectorXd y = Eigen::VectorXd::Ones(2);
  CHECK(dual_field(cs, y)[0] == doctest::Approx(1.0));
  CHECK_THROWS_AS(dual_field(cs, Eigen::VectorXd::Ones(3)), ContractViolationError);
}

TEST_CASE("continuous step holds the equilibrium") {
  auto p = case1_problem();
  auto kkt = kkt_solve(p);
  PrimalDualState s = PrimalDualState::Zero(4, 4);
  s.y = kkt.y_star;
  s.mu = kkt.mu_star;
  s.y_held = s.y;
  s.mu_held = s.mu;
  for (int k = 0; k < 100; ++k) step_continuous(p, s, 1e-2);
  CHECK((s.y - kkt.y_star).norm() < 1e-12);
  CHECK((s.mu - kkt.mu_star).norm() < 1e-12);
}

TEST_CASE("continuous flow reaches the scalar optimum") {
  auto p = single_agent(1.0);
  PrimalDualState s = PrimalDualState::Zero(1, 1);
  const double dt = 1e-3;
  for (int k = 0; k < 20000; ++k) step_continuous(p, s, dt);
  // Slowest closed-form mode decays at rate (3 - sqrt(5))/2, which leaves
  // ~3.5e-4 at t = 20; by t = 30 the error clears 1e-4 with margin.
  CHECK(std::abs(s.y[0] - 1.0) < 1e-3);
  for (int k = 0; k < 10000; ++k) step_continuous(p, s, dt);
  CHECK(std::abs(s.y[0] - 1.0) < 1e-4);
  CHECK(std::abs(s.mu[0] + 2.0) < 1e-3);
}

TEST_CASE("lyapunov value decreases along the continuous flow") {
  auto [p, graph] = random_instance(5, 2, 11, {1.0, 3.0});
  auto kkt = kkt_solve(p);
  PrimalDualState s = PrimalDualState::Zero(5, 2);
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int i = 0; i < 5; ++i) s.y[i] = u(rng);
  s.y_held = s.y;
  double v = lyap(p, s, kkt);
  for (int k = 0; k < 200; ++k) {
    step_continuous(p, s, 1e-2);
    const double v_next = lyap(p, s, kkt);
    CHECK(v_next < v);
    v = v_next;
  }
}

TEST_CASE("held step: constant field means exactly linear growth") {
  auto p = case1_problem();
  PrimalDualState s = PrimalDualState::Zero(4, 4);
  s.y << 0.1, 0.2, 0.3, 0.4;
  s.y_held = s.y;
  const Eigen::VectorXd g0 = primal_field(p, s.y_held, s.mu_held);
  const Eigen::VectorXd w0 = dual_field(p.constraints(), s.y_held);
  const Eigen::VectorXd y0 = s.y;
  const Eigen::VectorXd mu0 = s.mu;
  const double dt = 1e-3;
  const int steps = 1000;
  for (int k = 0; k < steps; ++k) step_held(p, s, dt);
  // Exact linear growth up to the rounding of 1000 accumulated increments.
  const double T = dt * steps;
  CHECK((s.y - (y0 + T * g0)).lpNorm<Eigen::Infinity>() < 1e-12);
  CHECK((s.mu - (mu0 + T * w0)).lpNorm<Eigen::Infinity>() < 1e-12);
}

TEST_CASE("held trajectory is affine between events") {
  auto p = case1_problem();
  PrimalDualState s = PrimalDualState::Zero(4, 4);
  s.y << 1.0, -0.5, 0.25, 0.0;
  s.y_held = s.y;
  std::vector<double> ts;
  std::vector<Eigen::VectorXd> ys;
  for (int k = 0; k < 50; ++k) {
    ts.push_back(s.t);
    ys.push_back(s.y);
    step_held(p, s, 1e-3);
  }
  // Least-squares affine fit per coordinate; residual must be at rounding level.
  for (int i = 0; i < 4; ++i) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const int npts = static_cast<int>(ts.size());
    for (int k = 0; k < npts; ++k) {
      sx += ts[static_cast<size_t>(k)];
      sy += ys[static_cast<size_t>(k)][i];
      sxx += ts[static_cast<size_t>(k)] * ts[static_cast<size_t>(k)];
      sxy += ts[static_cast<size_t>(k)] * ys[static_cast<size_t>(k)][i];
    }
    const double denom = npts * sxx - sx * sx;
    const double slope = (npts * sxy - sx * sy) / denom;
    const double icept = (sy - slope * sx) / npts;
    for (int k = 0; k < npts; ++k) {
      CHECK(std::abs(ys[static_cast<size_t>(k)][i] -
                     (icept + slope * ts[static_cast<size_t>(k)])) < 1e-12);
    }
  }
}

TEST_CASE("held machinery fed stage-synced values reproduces the RK4 flow") {
  // The continuous-communication limit: rebuilding the RK4 stages out of
  // held-field evaluations matches step_continuous at rounding level.
  auto p = case1_problem();
  PrimalDualState a = PrimalDualState::Zero(4, 4);
  a.y << 0.3, -0.2, 0.8, 0.1;
  a.y_held = a.y;
  PrimalDualState b = a;
  const double dt = 1e-3;
  for (int k = 0; k < 1000; ++k) {
    step_continuous(p, a, dt);

    auto f = [&](const Eigen::VectorXd& y, const Eigen::VectorXd& mu) {
      return std::make_pair(primal_field(p, y, mu), dual_field(p.constraints(), y));
    };
    auto [k1y, k1m] = f(b.y, b.mu);
    auto [k2y, k2m] = f(b.y + 0.5 * dt * k1y, b.mu + 0.5 * dt * k1m);
    auto [k3y, k3m] = f(b.y + 0.5 * dt * k2y, b.mu + 0.5 * dt * k2m);
    auto [k4y, k4m] = f(b.y + dt * k3y, b.mu + dt * k3m);
    b.y += dt / 6.0 * (k1y + 2 * k2y + 2 * k3y + k4y);
    b.mu += dt / 6.0 * (k1m + 2 * k2m + 2 * k3m + k4m);
  }
  CHECK((a.y - b.y).lpNorm<Eigen::Infinity>() < 1e-12);
  CHECK((a.mu - b.mu).lpNorm<Eigen::Infinity>() < 1e-12);
}

TEST_CASE("held mode with per-tick sync tracks the continuous flow at O(dt)") {
  // Broadcasting every tick makes the held dynamics a forward-Euler
  // discretization of the flow; the gap to RK4 is O(dt), not zero.
  auto p = single_agent(1.0);
  PrimalDualState euler = PrimalDualState::Zero(1, 1);
  PrimalDualState rk4 = PrimalDualState::Zero(1, 1);
  const double dt = 1e-3;
  double max_gap = 0.0;
  for (int k = 0; k < 10000; ++k) {
    euler.y_held = euler.y;
    euler.mu_held = euler.mu;
    step_held(p, euler, dt);
    step_continuous(p, rk4, dt);
    max_gap = std::max(max_gap, std::abs(euler.y[0] - rk4.y[0]));
  }
  CHECK(max_gap < 5e-2);
  CHECK(max_gap > 0.0);
}

TEST_CASE("rk4 is fourth order under step halving") {
  auto p = single_agent(1.0);
  auto endpoint = [&](double dt, double T) {
    PrimalDualState s = PrimalDualState::Zero(1, 1);
    const int steps = static_cast<int>(std::llround(T / dt));
    for (int k = 0; k < steps; ++k) step_continuous(p, s, dt);
    return std::make_pair(s.y[0], s.mu[0]);
  };
  const double T = 2.0;
  auto [yr, mr] = endpoint(T / 160.0, T);  // dt/8 reference
  auto [y1, m1] = endpoint(T / 20.0, T);
  auto [y2, m2] = endpoint(T / 40.0, T);
  const double e1 = std::hypot(y1 - yr, m1 - mr);
  const double e2 = std::hypot(y2 - yr, m2 - mr);
  const double factor = e1 / e2;
  CHECK(factor >= 8.0);
  CHECK(factor <= 32.0);
}

TEST_CASE("steppers reject bad arguments and diverging states") {
  auto p = single_agent(0.0);
  PrimalDualState s = PrimalDualState::Zero(1, 1);
  CHECK_THROWS_AS(step_continuous(p, s, 0.0), ContractViolationError);
  CHECK_THROWS_AS(step_held(p, s, -1.0), ContractViolationError);
  s.y[0] = 2e9;
  s.y_held = s.y;
  CHECK_THROWS_AS(step_held(p, s, 1e-3), DivergenceError);
}
