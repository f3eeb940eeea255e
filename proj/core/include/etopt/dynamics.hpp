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
//
// Primal-dual saddle-point vector fields and their integrators.
//
// Continuous flow:  y' = -grad f(y) - C^T (C y - d) - C^T mu,  mu' = C y - d.
// Sample-held flow: the same fields evaluated at the last-broadcast copies
// (y_held, mu_held), which are piecewise constant between broadcast events.
// Between events the held fields are constant, so the held-mode advance is
// exact (affine in t); the continuous mode uses fixed-step RK4.

#ifndef ETOPT_DYNAMICS_HPP_
#define ETOPT_DYNAMICS_HPP_

#include <Eigen/Core>

#include "etopt/problem.hpp"

namespace etopt {

// Joint optimization-layer state. last_broadcast has one entry per agent of
// the augmented network (n real followed by m virtual agents).
struct PrimalDualState {
  double t = 0.0;
  Eigen::VectorXd y;
  Eigen::VectorXd mu;
  Eigen::VectorXd y_held;
  Eigen::VectorXd mu_held;
  Eigen::VectorXd last_broadcast;

  static PrimalDualState Zero(Eigen::Index n, Eigen::Index m);
};

// g(y_held, mu_held) = -grad f(y_held) - C^T (C y_held - d) - C^T mu_held.
// Requires normalized constraints (the trigger theory assumes rho(C^T C)=1).
Eigen::VectorXd primal_field(const ProblemInstance& p, const Eigen::VectorXd& y_held,
                             const Eigen::VectorXd& mu_held);

// C y_held - d.
Eigen::VectorXd dual_field(const ConstraintSystem& cs, const Eigen::VectorXd& y_held);

// One RK4 step of the continuous flow (held values == current values at
// every stage). Throws DivergenceError on non-finite or unbounded state.
void step_continuous(const ProblemInstance& p, PrimalDualState& s, double dt);

// Exact advance of the sample-held dynamics over one step: the fields are
// frozen at (y_held, mu_held), so y += dt*g and mu += dt*(C y_held - d).
void step_held(const ProblemInstance& p, PrimalDualState& s, double dt);

// Divergence guard shared by all steppers.
inline constexpr double kDivergenceNorm = 1e9;

}  // namespace etopt

#endif  // ETOPT_DYNAMICS_HPP_
