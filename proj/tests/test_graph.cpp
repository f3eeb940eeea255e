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
#include <sstream>

#include "etopt/graph.hpp"
#include "etopt/io.hpp"
#include "etopt/scenarios.hpp"
#include "test_util.hpp"

using namespace etopt;

namespace {

Graph case2_topology() {
  return Graph::RingWithChords(59, {{0, 3}, {14, 24}, {24, 34}, {34, 44}, {44, 49}});
}

}  // namespace

TEST_CASE("graph basics") {
  Graph path(5, {{0, 1}, {1, 2}, {2, 3}, {3, 4}});
  CHECK(path.connected());
  CHECK(path.diameter() == 4);
  CHECK(Graph::Complete(6).diameter() == 1);
  CHECK_THROWS_AS(Graph(3, {{1, 1}}), ContractViolationError);
  Graph two(2, {});
  CHECK_FALSE(two.connected());
}

TEST_CASE("compatibility") {
  auto cs = etopt_test::case1_raw_constraints();
  Graph fig1(4, {{0, 1}, {2, 3}, {0, 2}, {1, 3}});
  CHECK(check_compatibility(fig1, cs));
  CHECK(check_compatibility(Graph::Complete(4), cs));

  // Ring of four with a constraint coupling opposite corners.
  Graph ring4 = Graph::RingWithChords(4, {});
  ConstraintSystem diag;
  diag.C = Eigen::MatrixXd::Zero(1, 4);
  diag.C(0, 0) = 1.0;
  diag.C(0, 2) = 1.0;
  diag.d = Eigen::VectorXd::Ones(1);
  CHECK_FALSE(check_compatibility(ring4, diag));
}

TEST_CASE("build_augmented matches the allocation topology") {
  auto cs_raw = etopt_test::case1_raw_constraints();
  auto cs = normalize_constraints(cs_raw);
  Graph fig1(4, {{0, 1}, {2, 3}, {0, 2}, {1, 3}});
  auto net = build_augmented(fig1, cs);
  CHECK(net.n_real == 4);
  CHECK(net.n_virtual == 4);
  // Virtual agent of the first row (x11 + x12 = 1) talks to agents 1 and 2.
  CHECK(net.neighbors[4] == std::vector<int>{0, 1});
  CHECK(net.neighbors[5] == std::vector<int>{2, 3});
  CHECK(net.neighbors[6] == std::vector<int>{0, 2});
  CHECK(net.neighbors[7] == std::vector<int>{1, 3});
  CHECK(net.host_of_virtual == std::vector<int>{0, 2, 0, 1});
  CHECK(net.connected());
  // Sparsity mirror, exhaustively.
  for (int i = 0; i < 4; ++i)
    for (int l = 0; l < 4; ++l)
      CHECK((net.adjacency_mu(i, l) == 1) == (cs.C(l, i) != 0.0));
}

TEST_CASE("build_augmented: diagonal constraints attach one real agent each") {
  ConstraintSystem cs;
  cs.C = Eigen::MatrixXd::Identity(3, 3);
  cs.d = Eigen::VectorXd::Ones(3);
  auto net = build_augmented(Graph::Complete(3), cs);
  for (int l = 0; l < 3; ++l) {
    CHECK(net.neighbors[static_cast<size_t>(3 + l)] == std::vector<int>{l});
    CHECK(net.host_of_virtual[static_cast<size_t>(l)] == l);
  }
}

TEST_CASE("build_augmented: incompatibility names the offenders") {
  ConstraintSystem cs;
  cs.C = Eigen::MatrixXd::Zero(1, 3);
  cs.C(0, 0) = 1.0;
  cs.C(0, 2) = 1.0;
  cs.d = Eigen::VectorXd::Ones(1);
  Graph chain(3, {{0, 1}, {1, 2}});
  try {
    build_augmented(chain, cs);
    FAIL("expected incompatibility");
  } catch (const ContractViolationError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("row 1") != std::string::npos);
    CHECK(msg.find("agents 1 and 3") != std::string::npos);
  }
  // Relaxed mode builds anyway (dense rows over sparse graphs).
  auto net = build_augmented(chain, cs, /*enforce_compatibility=*/false);
  CHECK(net.n_virtual == 1);
}

TEST_CASE("build_augmented: zero constraint row rejected") {
  ConstraintSystem cs;
  cs.C = Eigen::MatrixXd::Zero(2, 3);
  cs.C(0, 0) = 1.0;
  cs.d = Eigen::VectorXd::Ones(2);
  CHECK_THROWS_AS(build_augmented(Graph::Complete(3), cs, false), ContractViolationError);
}

TEST_CASE("augmented network is connected when the base is") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 10; ++trial) {
    auto [p, g] = random_instance(6, 2, 100 + trial, {1.0, 3.0});
    auto net = build_augmented(g, p.constraints());
    CHECK(net.connected());
  }
}

TEST_CASE("flood_bounds on a path") {
  Graph path(5, {{0, 1}, {1, 2}, {2, 3}, {3, 4}});
  Eigen::VectorXd lo(5), hi(5);
  lo << 3, 1, 4, 1, 5;
  hi << 3, 1, 4, 1, 5;
  auto res = flood_bounds(path, lo, hi);
  CHECK(res.lo == doctest::Approx(1.0));
  CHECK(res.hi == doctest::Approx(5.0));
  CHECK(res.rounds <= 4);
}

TEST_CASE("flood_bounds on a complete graph takes one round") {
  Graph k4 = Graph::Complete(4);
  Eigen::VectorXd lo(4), hi(4);
  lo << 2, 3, 4, 5;
  hi << 2, 3, 4, 5;
  auto res = flood_bounds(k4, lo, hi);
  CHECK(res.rounds == 1);
  CHECK(res.lo == doctest::Approx(2.0));
  CHECK(res.hi == doctest::Approx(5.0));
}

TEST_CASE("flood_bounds round count equals the BFS diameter on the dispatch graph") {
  Graph g = case2_topology();
  // Independent BFS oracle for the diameter and a peripheral vertex.
  std::vector<std::vector<int>> adj(59);
  for (auto [i, j] : g.edges()) {
    adj[static_cast<size_t>(i)].push_back(j);
    adj[static_cast<size_t>(j)].push_back(i);
  }
  int diameter = 0, peripheral = 0;
  for (int v = 0; v < 59; ++v) {
    auto dist = etopt_test::bfs_distances(adj, v);
    for (int d : dist) {
      if (d > diameter) {
        diameter = d;
        peripheral = v;
      }
    }
  }
  CHECK(g.diameter() == diameter);
  // Unique extrema at a peripheral vertex must flood for exactly ecc = d_g rounds.
  Eigen::VectorXd lo = Eigen::VectorXd::Ones(59), hi = Eigen::VectorXd::Zero(59);
  lo[peripheral] = 0.0;
  hi[peripheral] = 1.0;
  auto res = flood_bounds(g, lo, hi);
  CHECK(res.rounds == diameter);
}

TEST_CASE("flood_bounds equals direct extrema on seeded graphs and inputs") {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> u(-10.0, 10.0);
  for (int gi = 0; gi < 10; ++gi) {
    auto [p, g] = random_instance(8, 2, 500 + gi, {1.0, 2.0});
    for (int trial = 0; trial < 50; ++trial) {
      Eigen::VectorXd lo(8), hi(8);
      for (int i = 0; i < 8; ++i) {
        lo[i] = u(rng);
        hi[i] = u(rng);
      }
      auto res = flood_bounds(g, lo, hi);
      CHECK(res.lo == lo.minCoeff());
      CHECK(res.hi == hi.maxCoeff());
    }
  }
}

TEST_CASE("graph files: 1-based edge lists round-trip") {
  Graph g = Graph::RingWithChords(6, {{0, 3}});
  std::stringstream buf;
  buf << "n 6\n";
  for (auto [i, j] : g.edges()) buf << (i + 1) << " " << (j + 1) << "\n";
  Graph back = parse_graph(buf);
  CHECK(back.n_vertices() == 6);
  CHECK(back.edges() == g.edges());

  std::stringstream bad("0 1\n");
  CHECK_THROWS_AS(parse_graph(bad), ContractViolationError);
}
