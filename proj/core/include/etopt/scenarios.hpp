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
// Builders for the two case studies (a 2x2 resource allocation instance and
// a 59-area economic dispatch), their mid-run perturbation schedules, and
// seeded random instance generation. All randomness is derived from the
// given seed; identical seeds produce bit-identical scenarios.

#ifndef ETOPT_SCENARIOS_HPP_
#define ETOPT_SCENARIOS_HPP_

#include <Eigen/Core>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "etopt/graph.hpp"
#include "etopt/plant.hpp"
#include "etopt/problem.hpp"

namespace etopt {

// Bipartite allocation: l agents fill k task capacities. Variables are the
// nonzero cells x_{i,j}, j in K_i, ordered lexicographically by (i, j).
struct ResourceAllocationSpec {
  int l = 0;
  int k = 0;
  std::vector<std::vector<int>> task_sets;  // K_i, 0-based task indices
  Eigen::VectorXd agent_resources;          // P, length l
  Eigen::VectorXd task_capacities;          // T, length k
  std::vector<std::vector<double>> benefit; // one coefficient per (i, j in K_i)
};

// Raw (unnormalized) problem for a resource allocation spec: quadratic
// objectives benefit_{ij} * x^2 and the l + k balance rows. Validates
// sum(P) == sum(T) and non-empty task sets.
std::pair<std::vector<ScalarObjective>, ConstraintSystem> resource_allocation_problem(
    const ResourceAllocationSpec& spec);

// Minimal compatible topology: an edge for every pair of variables that
// share a constraint row.
Graph resource_allocation_graph(const ResourceAllocationSpec& spec);

enum class PerturbationKind { kLoadChange, kCostChange, kBusDisconnect };

// A scheduled mutation of the dispatch data. Payloads are resolved at build
// time so a schedule is replayable from the scenario alone.
struct Perturbation {
  double time = 0.0;
  PerturbationKind kind = PerturbationKind::kLoadChange;
  std::vector<int> areas;        // load targets / quadratic-cost targets / victims
  std::vector<double> factors;   // multiplicative factors for `areas`
  std::vector<int> areas_b;      // linear-cost targets (cost change only)
  std::vector<double> factors_b;
};

// Economic dispatch over n_areas generators: per-area generation cost
// a P^2 + b P + c plus transfer cost a' (P - Pd)^2 + b' (P - Pd) + c',
// a single network balance row sum(P) = sum(Pd), and first-order generator
// dynamics P' = r P + s u with r, s drawn from their uncertainty ranges.
struct DedpSpec {
  int n_areas = 0;
  uint64_t seed = 0;
  Eigen::VectorXd a, a_prime, b, b_prime, c, c_prime;
  Eigen::VectorXd load;           // Pd
  Eigen::VectorXd r, s;           // plant parameters (actual, uncertain)
  std::set<int> disconnected;     // areas removed from the balance row

  // Combined per-area quadratic in P: (a+a') P^2 + (b+b'-2a'Pd) P + const.
  std::vector<ScalarObjective> combined_objectives() const;
  // Balance row over connected areas, then normalized.
  ConstraintSystem balance_constraints() const;
};

struct Scenario {
  std::string name;
  ProblemInstance problem;  // constraints normalized
  Graph graph;
  std::vector<AgentPlant> plants;
  Eigen::VectorXd x0;
  std::vector<Perturbation> schedule;
  // Case 2 routes one dense balance row over a sparse graph, so the
  // compatibility precondition is deliberately relaxed there.
  bool enforce_compatibility = true;
  std::optional<DedpSpec> dedp;

  Scenario(std::string name_in, ProblemInstance problem_in, Graph graph_in,
           std::vector<AgentPlant> plants_in, Eigen::VectorXd x0_in)
      : name(std::move(name_in)),
        problem(std::move(problem_in)),
        graph(std::move(graph_in)),
        plants(std::move(plants_in)),
        x0(std::move(x0_in)) {}
};

// The 2-agent / 2-task allocation instance: objectives 5x^2, 15x^2, 20x^2,
// 10x^2 (strictly convex sign convention), the four printed balance rows,
// the 4-cycle topology, and per-variable linear plants with +-20% seeded
// parameter uncertainty. x(0) = 0.
Scenario build_case1(uint64_t uncertainty_seed = 1);

// The 59-generator dispatch instance on a ring with chord edges (1,4),
// (15,25), (25,35), (35,45), (45,50) [1-based], seeded coefficient draws
// inside the declared ranges, x(0) = local load, and the perturbation
// schedule at t = 2 (loads), t = 3 (costs), t = 4 (bus disconnects).
Scenario build_case2(uint64_t seed);

// Applies one perturbation in place. Bus disconnects that would disconnect
// the residual graph raise ScenarioError (build_case2 pre-validates its
// scheduled victims, so this only fires for hand-built schedules).
void apply_perturbation(Scenario& scenario, const Perturbation& pert);

// Seeded strictly convex quadratics (second derivative inside
// curvature_range), a consistent random constraint system, and a connected
// graph compatible with it by construction.
std::pair<ProblemInstance, Graph> random_instance(int n, int m, uint64_t seed,
                                                  std::pair<double, double> curvature_range);

}  // namespace etopt

#endif  // ETOPT_SCENARIOS_HPP_
