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

#include "etopt/scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace etopt {

namespace {

// splitmix64: decorrelates sub-seeds derived from one master seed.
uint64_t mix_seed(uint64_t seed, uint64_t salt) {
  uint64_t z = seed + 0x9e3779b97f4a7c15ull * (salt + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

std::vector<int> sample_without_replacement(std::mt19937_64& rng, int population, int count,
                                            const std::set<int>& exclude = {}) {
  std::vector<int> pool;
  for (int i = 0; i < population; ++i) {
    if (!exclude.count(i)) pool.push_back(i);
  }
  std::vector<int> out;
  for (int c = 0; c < count && !pool.empty(); ++c) {
    std::uniform_int_distribution<size_t> pick(0, pool.size() - 1);
    size_t idx = pick(rng);
    out.push_back(pool[idx]);
    pool.erase(pool.begin() + static_cast<long>(idx));
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

std::pair<std::vector<ScalarObjective>, ConstraintSystem> resource_allocation_problem(
    const ResourceAllocationSpec& spec) {
  if (spec.l <= 0 || spec.k <= 0) throw InvalidProblemError("resource allocation needs l, k > 0");
  if (std::abs(spec.agent_resources.sum() - spec.task_capacities.sum()) > 1e-9) {
    throw InvalidProblemError("resource allocation: sum of resources must equal sum of capacities");
  }
  int n = 0;
  for (int i = 0; i < spec.l; ++i) {
    if (spec.task_sets[static_cast<size_t>(i)].empty()) {
      throw InvalidProblemError("resource allocation: empty task set for agent " +
                                std::to_string(i + 1));
    }
    n += static_cast<int>(spec.task_sets[static_cast<size_t>(i)].size());
  }
  std::vector<ScalarObjective> objectives;
  std::vector<std::pair<int, int>> vars;  // (agent, task) per variable
  for (int i = 0; i < spec.l; ++i) {
    const auto& tasks = spec.task_sets[static_cast<size_t>(i)];
    for (size_t jj = 0; jj < tasks.size(); ++jj) {
      objectives.push_back(ScalarObjective::Quadratic(spec.benefit[static_cast<size_t>(i)][jj]));
      vars.emplace_back(i, tasks[jj]);
    }
  }
  const int m = spec.l + spec.k;
  ConstraintSystem cs;
  cs.C = Eigen::MatrixXd::Zero(m, n);
  cs.d = Eigen::VectorXd::Zero(m);
  for (int v = 0; v < n; ++v) {
    auto [agent, task] = vars[static_cast<size_t>(v)];
    cs.C(agent, v) = 1.0;
    cs.C(spec.l + task, v) = 1.0;
  }
  cs.d.head(spec.l) = spec.agent_resources;
  cs.d.tail(spec.k) = spec.task_capacities;
  return {std::move(objectives), std::move(cs)};
}

Graph resource_allocation_graph(const ResourceAllocationSpec& spec) {
  auto [objectives, cs] = resource_allocation_problem(spec);
  const int n = static_cast<int>(cs.cols());
  std::set<std::pair<int, int>> edges;
  for (Eigen::Index l = 0; l < cs.rows(); ++l) {
    for (int j = 0; j < n; ++j) {
      if (cs.C(l, j) == 0.0) continue;
      for (int k = j + 1; k < n; ++k) {
        if (cs.C(l, k) != 0.0) edges.insert({j, k});
      }
    }
  }
  return Graph(n, edges);
}

Scenario build_case1(uint64_t uncertainty_seed) {
  ResourceAllocationSpec spec;
  spec.l = 2;
  spec.k = 2;
  spec.task_sets = {{0, 1}, {0, 1}};
  spec.agent_resources = Eigen::Vector2d(1.0, 1.0);
  spec.task_capacities = Eigen::Vector2d(1.0, 1.0);
  spec.benefit = {{5.0, 15.0}, {20.0, 10.0}};

  auto [objectives, raw] = resource_allocation_problem(spec);
  ProblemInstance problem(std::move(objectives), normalize_constraints(raw));
  Graph graph = resource_allocation_graph(spec);

  // Per-variable linear plants x' = (a + da) x + (b + db) u with the row-major
  // entries of the 2x2 coefficient matrices; uncertainties are seeded draws
  // within +-20% of the nominal magnitudes.
  const double a_nom[4] = {-2.0, -3.0, -4.0, -5.0};
  const double b_nom[4] = {2.0, 3.0, 4.0, 5.0};
  std::mt19937_64 rng(mix_seed(uncertainty_seed, 0xCA5E1));
  std::vector<AgentPlant> plants;
  for (int i = 0; i < 4; ++i) {
    AgentPlant pl;
    const double a = a_nom[i];
    pl.p_known = [a](double x) { return a * x; };
    const double da = uniform(rng, -0.2, 0.2) * std::abs(a);
    pl.delta_p = [da](double x) { return da * x; };
    pl.b_known = b_nom[i];
    pl.delta_b = uniform(rng, -0.2, 0.2) * std::abs(b_nom[i]);
    pl.rho_b = 0.2 * std::abs(b_nom[i]);
    pl.lipschitz_p = std::abs(a);
    plants.push_back(std::move(pl));
  }

  Scenario s("case1", std::move(problem), std::move(graph), std::move(plants),
             Eigen::VectorXd::Zero(4));
  return s;
}

std::vector<ScalarObjective> DedpSpec::combined_objectives() const {
  std::vector<ScalarObjective> out;
  out.reserve(static_cast<size_t>(n_areas));
  for (int i = 0; i < n_areas; ++i) {
    const double A = a[i] + a_prime[i];
    const double B = b[i] + b_prime[i] - 2.0 * a_prime[i] * load[i];
    const double K = c[i] + c_prime[i] + a_prime[i] * load[i] * load[i] - b_prime[i] * load[i];
    out.push_back(ScalarObjective::Quadratic(A, B, K));
  }
  return out;
}

ConstraintSystem DedpSpec::balance_constraints() const {
  ConstraintSystem raw;
  raw.C = Eigen::MatrixXd::Zero(1, n_areas);
  double total_load = 0.0;
  for (int i = 0; i < n_areas; ++i) {
    if (disconnected.count(i)) continue;
    raw.C(0, i) = 1.0;
    total_load += load[i];
  }
  raw.d = Eigen::VectorXd::Constant(1, total_load);
  return normalize_constraints(raw);
}

namespace {

Graph case2_graph(int n_areas, const std::set<int>& disconnected) {
  // Ring plus the chord edges, 1-based in the source description.
  std::set<std::pair<int, int>> chords = {{0, 3}, {14, 24}, {24, 34}, {34, 44}, {44, 49}};
  Graph g = Graph::RingWithChords(n_areas, chords);
  if (disconnected.empty()) return g;
  return g.without_vertices(std::vector<int>(disconnected.begin(), disconnected.end()));
}

// Connectivity of the still-attached areas after removing victims.
bool residual_connected(int n_areas, const std::set<int>& victims) {
  Graph g = case2_graph(n_areas, victims);
  std::vector<int> alive;
  for (int i = 0; i < n_areas; ++i) {
    if (!victims.count(i)) alive.push_back(i);
  }
  // BFS restricted to alive vertices.
  std::vector<char> seen(static_cast<size_t>(n_areas), 0);
  std::vector<int> stack{alive.front()};
  seen[static_cast<size_t>(alive.front())] = 1;
  size_t count = 1;
  while (!stack.empty()) {
    int v = stack.back();
    stack.pop_back();
    for (int w : g.neighbors(v)) {
      if (!seen[static_cast<size_t>(w)]) {
        seen[static_cast<size_t>(w)] = 1;
        ++count;
        stack.push_back(w);
      }
    }
  }
  return count == alive.size();
}

}  // namespace

Scenario build_case2(uint64_t seed) {
  constexpr int kAreas = 59;
  DedpSpec spec;
  spec.n_areas = kAreas;
  spec.seed = seed;
  auto draw_vec = [&](uint64_t salt, double lo, double hi) {
    std::mt19937_64 rng(mix_seed(seed, salt));
    Eigen::VectorXd v(kAreas);
    for (int i = 0; i < kAreas; ++i) v[i] = uniform(rng, lo, hi);
    return v;
  };
  spec.a = draw_vec(1, 0.0024, 0.0679);
  spec.a_prime = draw_vec(2, 0.0024, 0.0679);
  spec.b = draw_vec(3, 8.3391, 37.6968);
  spec.b_prime = draw_vec(4, 8.3391, 37.6968);
  spec.c = draw_vec(5, 6.78, 74.33);
  spec.c_prime = draw_vec(6, 6.78, 74.33);
  spec.load = draw_vec(7, 0.0, 300.0);
  spec.r = draw_vec(8, 5.0, 10.0);
  spec.s = draw_vec(9, 7.0, 8.0);

  ProblemInstance problem(spec.combined_objectives(), spec.balance_constraints());
  Graph graph = case2_graph(kAreas, {});

  // Nominal plant model is the midpoint of each uncertainty range; the
  // drawn (r, s) act on the plant only.
  std::vector<AgentPlant> plants;
  for (int i = 0; i < kAreas; ++i) {
    AgentPlant pl;
    const double r_nom = 7.5, s_nom = 7.5;
    pl.p_known = [r_nom](double x) { return r_nom * x; };
    const double dr = spec.r[i] - r_nom;
    pl.delta_p = [dr](double x) { return dr * x; };
    pl.b_known = s_nom;
    pl.delta_b = spec.s[i] - s_nom;
    pl.rho_b = 0.5;
    pl.lipschitz_p = r_nom;
    plants.push_back(std::move(pl));
  }

  Scenario s("case2", std::move(problem), std::move(graph), std::move(plants), spec.load);
  s.enforce_compatibility = false;

  // Perturbation schedule, payloads resolved now from the seed.
  {
    std::mt19937_64 rng(mix_seed(seed, 10));
    Perturbation p;
    p.time = 2.0;
    p.kind = PerturbationKind::kLoadChange;
    p.areas = sample_without_replacement(rng, kAreas, 18);
    for (size_t i = 0; i < p.areas.size(); ++i) {
      p.factors.push_back(rng() % 2 == 0 ? 1.2 : 0.8);
    }
    s.schedule.push_back(std::move(p));
  }
  {
    std::mt19937_64 rng(mix_seed(seed, 11));
    Perturbation p;
    p.time = 3.0;
    p.kind = PerturbationKind::kCostChange;
    p.areas = sample_without_replacement(rng, kAreas, 18);
    for (size_t i = 0; i < p.areas.size(); ++i) p.factors.push_back(1.0 + uniform(rng, 0.0, 0.5));
    std::set<int> taken(p.areas.begin(), p.areas.end());
    p.areas_b = sample_without_replacement(rng, kAreas, 18, taken);
    for (size_t i = 0; i < p.areas_b.size(); ++i) p.factors_b.push_back(1.0 + uniform(rng, -0.5, 0.0));
    s.schedule.push_back(std::move(p));
  }
  {
    std::mt19937_64 rng(mix_seed(seed, 12));
    Perturbation p;
    p.time = 4.0;
    p.kind = PerturbationKind::kBusDisconnect;
    // Draw victim pairs until the residual graph stays connected.
    for (int attempt = 0; attempt < 1000; ++attempt) {
      auto victims = sample_without_replacement(rng, kAreas, 2);
      std::set<int> vs(victims.begin(), victims.end());
      if (residual_connected(kAreas, vs)) {
        p.areas = victims;
        break;
      }
    }
    if (p.areas.empty()) throw ScenarioError("build_case2: no connected disconnect pair found");
    s.schedule.push_back(std::move(p));
  }

  s.dedp = std::move(spec);
  return s;
}

void apply_perturbation(Scenario& scenario, const Perturbation& pert) {
  if (!scenario.dedp.has_value()) {
    throw ScenarioError("apply_perturbation: scenario carries no dispatch data");
  }
  DedpSpec& spec = *scenario.dedp;
  switch (pert.kind) {
    case PerturbationKind::kLoadChange:
      for (size_t i = 0; i < pert.areas.size(); ++i) {
        spec.load[pert.areas[i]] *= pert.factors[i];
      }
      break;
    case PerturbationKind::kCostChange:
      for (size_t i = 0; i < pert.areas.size(); ++i) {
        spec.a[pert.areas[i]] *= pert.factors[i];
      }
      for (size_t i = 0; i < pert.areas_b.size(); ++i) {
        spec.b[pert.areas_b[i]] *= pert.factors_b[i];
      }
      break;
    case PerturbationKind::kBusDisconnect: {
      std::set<int> victims = spec.disconnected;
      victims.insert(pert.areas.begin(), pert.areas.end());
      if (!residual_connected(spec.n_areas, victims)) {
        throw ScenarioError("bus disconnect would disconnect the residual graph");
      }
      spec.disconnected = std::move(victims);
      scenario.graph = case2_graph(spec.n_areas, spec.disconnected);
      break;
    }
  }
  scenario.problem = ProblemInstance(spec.combined_objectives(), spec.balance_constraints());
}

std::pair<ProblemInstance, Graph> random_instance(int n, int m, uint64_t seed,
                                                  std::pair<double, double> curvature_range) {
  if (m > n) throw InvalidProblemError("random_instance: need m <= n");
  if (!(curvature_range.first > 0.0) || curvature_range.second < curvature_range.first) {
    throw InvalidProblemError("random_instance: bad curvature range");
  }
  std::mt19937_64 rng(mix_seed(seed, 0x5EED));
  std::vector<ScalarObjective> objectives;
  for (int i = 0; i < n; ++i) {
    const double curv = uniform(rng, curvature_range.first, curvature_range.second);
    objectives.push_back(ScalarObjective::Quadratic(0.5 * curv, uniform(rng, -1.0, 1.0)));
  }

  // Each constraint row touches a small random subset of agents; the
  // right-hand side is C times a random point, so the system is feasible.
  ConstraintSystem raw;
  raw.C = Eigen::MatrixXd::Zero(m, n);
  for (int l = 0; l < m; ++l) {
    const int nnz = 2 + static_cast<int>(rng() % static_cast<uint64_t>(std::min(3, n - 1)));
    auto cols = sample_without_replacement(rng, n, nnz);
    for (int jcol : cols) {
      double v = uniform(rng, 0.5, 1.5) * (rng() % 2 == 0 ? 1.0 : -1.0);
      raw.C(l, jcol) = v;
    }
  }
  Eigen::VectorXd y_feasible(n);
  for (int i = 0; i < n; ++i) y_feasible[i] = uniform(rng, -1.0, 1.0);
  raw.d = raw.C * y_feasible;

  // Compatibility by construction: edges for all co-occurring pairs, a few
  // random extras, then stitch components together.
  std::set<std::pair<int, int>> edges;
  for (int l = 0; l < m; ++l) {
    for (int j = 0; j < n; ++j) {
      if (raw.C(l, j) == 0.0) continue;
      for (int k = j + 1; k < n; ++k) {
        if (raw.C(l, k) != 0.0) edges.insert({j, k});
      }
    }
  }
  const int extras = n / 2;
  for (int e = 0; e < extras; ++e) {
    int i = static_cast<int>(rng() % static_cast<uint64_t>(n));
    int j = static_cast<int>(rng() % static_cast<uint64_t>(n));
    if (i != j) edges.insert({std::min(i, j), std::max(i, j)});
  }
  Graph g(n, edges);
  while (!g.connected()) {
    // Join the component of vertex 0 to some unreached vertex.
    std::vector<char> seen(static_cast<size_t>(n), 0);
    std::vector<int> stack{0};
    seen[0] = 1;
    while (!stack.empty()) {
      int v = stack.back();
      stack.pop_back();
      for (int w : g.neighbors(v)) {
        if (!seen[static_cast<size_t>(w)]) {
          seen[static_cast<size_t>(w)] = 1;
          stack.push_back(w);
        }
      }
    }
    int inside = -1, outside = -1;
    for (int v = 0; v < n; ++v) {
      if (seen[static_cast<size_t>(v)] && inside < 0) inside = v;
      if (!seen[static_cast<size_t>(v)] && outside < 0) outside = v;
    }
    edges.insert({std::min(inside, outside), std::max(inside, outside)});
    g = Graph(n, edges);
  }

  ProblemInstance problem(std::move(objectives), normalize_constraints(raw));
  return {std::move(problem), std::move(g)};
}

}  // namespace etopt
