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

#include <cmath>

#include "etopt/scenarios.hpp"
#include "test_util.hpp"

using namespace etopt;

TEST_CASE("case1: optimum, topology, and seeded uncertainties") {
  auto sc = build_case1(1);
  auto kkt = kkt_solve(sc.problem);
  Eigen::Vector4d expect(0.7, 0.3, 0.3, 0.7);
  CHECK((kkt.y_star - expect).lpNorm<Eigen::Infinity>() < 1e-9);
  CHECK((sc.problem.constraints().C * kkt.y_star - sc.problem.constraints().d).norm() < 1e-12);

  auto net = build_augmented(sc.graph, sc.problem.constraints());
  CHECK(net.n_real == 4);
  CHECK(net.n_virtual == 4);
  CHECK(net.neighbors[4] == std::vector<int>{0, 1});

  const double b_nom[4] = {2.0, 3.0, 4.0, 5.0};
  const double a_nom[4] = {-2.0, -3.0, -4.0, -5.0};
  for (int i = 0; i < 4; ++i) {
    const auto& pl = sc.plants[static_cast<size_t>(i)];
    CHECK(std::abs(pl.delta_b) <= pl.rho_b + 1e-15);
    CHECK(pl.rho_b == doctest::Approx(0.2 * b_nom[i]));
    // delta_p is linear with seeded slope within 20% of |a|.
    const double slope = pl.delta_p(1.0);
    CHECK(std::abs(slope) <= 0.2 * std::abs(a_nom[i]) + 1e-15);
    CHECK(pl.p_known(2.0) == doctest::Approx(2.0 * a_nom[i]));
  }

  auto sc_same = build_case1(1);
  auto sc_other = build_case1(2);
  CHECK(sc.plants[0].delta_b == sc_same.plants[0].delta_b);
  CHECK(sc.plants[0].delta_b != sc_other.plants[0].delta_b);
}

TEST_CASE("case2: ranges, balance, determinism") {
  auto sc = build_case2(7);
  REQUIRE(sc.dedp.has_value());
  const auto& d = *sc.dedp;
  CHECK(d.n_areas == 59);
  for (int i = 0; i < 59; ++i) {
    CHECK(d.a[i] >= 0.0024);
    CHECK(d.a[i] <= 0.0679);
    CHECK(d.a_prime[i] >= 0.0024);
    CHECK(d.a_prime[i] <= 0.0679);
    CHECK(d.b[i] >= 8.3391);
    CHECK(d.b[i] <= 37.6968);
    CHECK(d.c[i] >= 6.78);
    CHECK(d.c[i] <= 74.33);
    CHECK(d.load[i] >= 0.0);
    CHECK(d.load[i] <= 300.0);
    CHECK(d.r[i] >= 5.0);
    CHECK(d.r[i] <= 10.0);
    CHECK(d.s[i] >= 7.0);
    CHECK(d.s[i] <= 8.0);
    // Combined curvature range follows from the coefficient ranges.
    const double curv = sc.problem.objective(i).second_deriv_lo();
    CHECK(curv >= 0.0096);
    CHECK(curv <= 0.2716);
  }

  // The balance constraint: sum of the optimum equals total load.
  auto kkt = kkt_solve(sc.problem);
  CHECK(kkt.y_star.sum() == doctest::Approx(d.load.sum()).epsilon(1e-10));
  CHECK(std::abs(spectral_radius_ctc(sc.problem.constraints().C) - 1.0) < 1e-9);

  // Ring plus five chords.
  CHECK(sc.graph.n_vertices() == 59);
  CHECK(sc.graph.edges().size() == 64);
  CHECK(sc.graph.has_edge(0, 3));
  CHECK(sc.graph.has_edge(44, 49));

  // x(0) is the local load; schedule at t = 2, 3, 4.
  CHECK((sc.x0 - d.load).norm() == 0.0);
  REQUIRE(sc.schedule.size() == 3);
  CHECK(sc.schedule[0].time == doctest::Approx(2.0));
  CHECK(sc.schedule[0].kind == PerturbationKind::kLoadChange);
  CHECK(sc.schedule[0].areas.size() == 18);
  CHECK(sc.schedule[1].kind == PerturbationKind::kCostChange);
  CHECK(sc.schedule[1].areas.size() == 18);
  CHECK(sc.schedule[1].areas_b.size() == 18);
  CHECK(sc.schedule[2].kind == PerturbationKind::kBusDisconnect);
  CHECK(sc.schedule[2].areas.size() == 2);
  CHECK_FALSE(sc.enforce_compatibility);

  // Bit-identical rebuild from the same seed.
  auto sc2 = build_case2(7);
  CHECK((sc.x0 - sc2.x0).norm() == 0.0);
  CHECK((sc.dedp->a - sc2.dedp->a).norm() == 0.0);
  CHECK(sc.schedule[0].areas == sc2.schedule[0].areas);
  auto sc3 = build_case2(8);
  CHECK((sc.dedp->a - sc3.dedp->a).norm() != 0.0);
}

TEST_CASE("perturbations mutate the dispatch data in place") {
  auto sc = build_case2(3);
  auto kkt_before = kkt_solve(sc.problem);
  const double load_before = sc.dedp->load.sum();

  SUBCASE("load change updates the balance right-hand side") {
    Perturbation p;
    p.kind = PerturbationKind::kLoadChange;
    p.areas = {0};
    p.factors = {1.2};
    const double old0 = sc.dedp->load[0];
    apply_perturbation(sc, p);
    CHECK(sc.dedp->load[0] == doctest::Approx(1.2 * old0));
    const double total = sc.dedp->load.sum();
    CHECK(total == doctest::Approx(load_before + 0.2 * old0));
    // Normalized rhs reflects the new total.
    CHECK(sc.problem.constraints().d[0] == doctest::Approx(total / std::sqrt(59.0)));
  }

  SUBCASE("scheduled perturbations move the oracle") {
    apply_perturbation(sc, sc.schedule[0]);
    auto kkt_after = kkt_solve(sc.problem);
    CHECK((kkt_after.y_star - kkt_before.y_star).norm() > 1e-6);
  }

  SUBCASE("bus disconnect drops balance entries, edges, and renormalizes") {
    apply_perturbation(sc, sc.schedule[2]);
    const auto& victims = sc.schedule[2].areas;
    const auto& cs = sc.problem.constraints();
    for (int v : victims) {
      CHECK(cs.C(0, v) == 0.0);
      CHECK(sc.graph.neighbors(v).empty());
    }
    CHECK(std::abs(spectral_radius_ctc(cs.C) - 1.0) < 1e-9);
    // Disconnected loads leave the balance.
    double expected = 0.0;
    for (int i = 0; i < 59; ++i) {
      if (!sc.dedp->disconnected.count(i)) expected += sc.dedp->load[i];
    }
    CHECK(cs.d[0] == doctest::Approx(expected / std::sqrt(57.0)));
    CHECK_NOTHROW(kkt_solve(sc.problem));
  }

  SUBCASE("a disconnect that isolates an area is refused") {
    Perturbation p;
    p.kind = PerturbationKind::kBusDisconnect;
    // Vertex 57 touches only ring edges (56,57) and (57,58); removing both
    // neighbors leaves it stranded.
    p.areas = {56, 58};
    CHECK_THROWS_AS(apply_perturbation(sc, p), ScenarioError);
  }
}

TEST_CASE("random instances are valid, compatible, deterministic") {
  for (uint64_t seed : {42ull, 43ull, 44ull, 45ull, 46ull}) {
    auto [p, g] = random_instance(6, 2, seed, {1.0, 4.0});
    auto report = validate_assumptions(p);
    CHECK(report.all_strictly_convex());
    CHECK(report.bounds_sane);
    CHECK(check_compatibility(g, p.constraints()));
    CHECK(g.connected());
    CHECK_NOTHROW(kkt_solve(p));
  }
  auto [p1, g1] = random_instance(6, 2, 42, {1.0, 4.0});
  auto [p2, g2] = random_instance(6, 2, 42, {1.0, 4.0});
  CHECK((p1.constraints().C - p2.constraints().C).norm() == 0.0);
  CHECK(g1.edges() == g2.edges());
  CHECK_THROWS_AS(random_instance(2, 3, 1, {1.0, 2.0}), InvalidProblemError);
}
