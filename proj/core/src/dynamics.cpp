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

#include "etopt/dynamics.hpp"

#include <cmath>

namespace etopt {

PrimalDualState PrimalDualState::Zero(Eigen::Index n, Eigen::Index m) {
  PrimalDualState s;
  s.y = Eigen::VectorXd::Zero(n);
  s.mu = Eigen::VectorXd::Zero(m);
  s.y_held = Eigen::VectorXd::Zero(n);
  s.mu_held = Eigen::VectorXd::Zero(m);
  s.last_broadcast = Eigen::VectorXd::Zero(n + m);
  return s;
}

Eigen::VectorXd primal_field(const ProblemInstance& p, const Eigen::VectorXd& y_held,
                             const Eigen::VectorXd& mu_held) {
  const auto& cs = p.constraints();
  if (y_held.size() != p.num_agents() || mu_held.size() != cs.rows()) {
    throw ContractViolationError("primal_field: dimension mismatch");
  }
  return -p.gradient(y_held) - cs.C.transpose() * (cs.C * y_held - cs.d) -
         cs.C.transpose() * mu_held;
}

Eigen::VectorXd dual_field(const ConstraintSystem& cs, const Eigen::VectorXd& y_held) {
  if (y_held.size() != cs.cols()) {
    throw ContractViolationError("dual_field: dimension mismatch");
  }
  return cs.C * y_held - cs.d;
}

namespace {

void check_finite(const PrimalDualState& s) {
  const double norm = std::sqrt(s.y.squaredNorm() + s.mu.squaredNorm());
  if (!std::isfinite(norm) || norm > kDivergenceNorm) {
    throw DivergenceError("primal-dual state diverged at t = " + std::to_string(s.t) +
                          " (|(y,mu)| = " + std::to_string(norm) + ")");
  }
}

}  // namespace

void step_continuous(const ProblemInstance& p, PrimalDualState& s, double dt) {
  if (!(dt > 0.0)) throw ContractViolationError("step_continuous: dt must be positive");
  const auto& cs = p.constraints();
  auto f = [&](const Eigen::VectorXd& y, const Eigen::VectorXd& mu,
               Eigen::VectorXd& ky, Eigen::VectorXd& km) {
    ky = primal_field(p, y, mu);
    km = dual_field(cs, y);
  };
  Eigen::VectorXd k1y, k1m, k2y, k2m, k3y, k3m, k4y, k4m;
  f(s.y, s.mu, k1y, k1m);
  f(s.y + 0.5 * dt * k1y, s.mu + 0.5 * dt * k1m, k2y, k2m);
  f(s.y + 0.5 * dt * k2y, s.mu + 0.5 * dt * k2m, k3y, k3m);
  f(s.y + dt * k3y, s.mu + dt * k3m, k4y, k4m);
  s.y += (dt / 6.0) * (k1y + 2.0 * k2y + 2.0 * k3y + k4y);
  s.mu += (dt / 6.0) * (k1m + 2.0 * k2m + 2.0 * k3m + k4m);
  s.t += dt;
  // Continuous mode keeps the held copies aliased to the current state.
  s.y_held = s.y;
  s.mu_held = s.mu;
  check_finite(s);
}

void step_held(const ProblemInstance& p, PrimalDualState& s, double dt) {
  if (!(dt > 0.0)) throw ContractViolationError("step_held: dt must be positive");
  s.y += dt * primal_field(p, s.y_held, s.mu_held);
  s.mu += dt * dual_field(p.constraints(), s.y_held);
  s.t += dt;
  check_finite(s);
}

}  // namespace etopt
