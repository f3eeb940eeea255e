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
// Undirected communication topology, the augmented network with one virtual
// node per constraint row, constraint/graph compatibility checks, and the
// min/max-consensus flooding used to agree on global curvature bounds.
// All vertices are 0-based in code; graph files are 1-based.

#ifndef ETOPT_GRAPH_HPP_
#define ETOPT_GRAPH_HPP_

#include <Eigen/Core>
#include <set>
#include <utility>
#include <vector>

#include "etopt/problem.hpp"

namespace etopt {

class Graph {
 public:
  // Edges are stored as (min, max) pairs; self-loops are rejected.
  Graph(int n_vertices, const std::set<std::pair<int, int>>& edges);

  static Graph Complete(int n_vertices);
  // Cycle 0-1-...-(n-1)-0 plus the given chord edges.
  static Graph RingWithChords(int n_vertices, const std::set<std::pair<int, int>>& chords);

  int n_vertices() const { return n_; }
  const std::set<std::pair<int, int>>& edges() const { return edges_; }
  const std::vector<int>& neighbors(int v) const { return adj_[static_cast<size_t>(v)]; }
  bool has_edge(int i, int j) const;

  bool connected() const;
  // Longest shortest path, by BFS from every vertex. Requires connectivity.
  int diameter() const;

  // Removes a vertex's incident edges (the vertex index remains valid but
  // isolated). Used by scenario-scripted disconnects.
  Graph without_vertices(const std::vector<int>& victims) const;

 private:
  int n_ = 0;
  std::set<std::pair<int, int>> edges_;
  std::vector<std::vector<int>> adj_;
};

// Real agents 0..n-1 plus one virtual agent n+l per constraint row l. The
// virtual agent l is adjacent to exactly the real agents with c_{l,i} != 0;
// there are no virtual-virtual edges.
struct AugmentedNetwork {
  int n_real = 0;
  int n_virtual = 0;
  // Adjacency over all n_real + n_virtual agents (virtual rows contain only
  // real indices and vice versa for the incidence part).
  std::vector<std::vector<int>> neighbors;
  // adjacency_mu(i, l) == 1 iff real agent i participates in constraint l.
  Eigen::MatrixXi adjacency_mu;
  // Lowest-index participating real agent, per virtual agent.
  std::vector<int> host_of_virtual;

  int total() const { return n_real + n_virtual; }
  bool connected() const;
};

// True iff every pair of agents sharing a constraint row is joined by an
// edge of g.
bool check_compatibility(const Graph& g, const ConstraintSystem& cs);

// Builds the augmented network. With enforce_compatibility (the default) an
// incompatible pair raises ContractViolationError naming the constraint row
// and agent pair; scenario code may relax the check when the underlying
// experiment does (a dense balance row routed over a sparse graph).
// Zero constraint rows are always rejected.
AugmentedNetwork build_augmented(const Graph& g, const ConstraintSystem& cs,
                                 bool enforce_compatibility = true);

struct FloodResult {
  double lo = 0.0;
  double hi = 0.0;
  int rounds = 0;
};

// Synchronous min/max consensus over g: every round each vertex replaces its
// values by the min (resp. max) over itself and its neighbors. Converges in
// at most diameter(g) rounds; the returned round count is the first round
// after which all vertices hold the global extrema.
FloodResult flood_bounds(const Graph& g, const Eigen::VectorXd& local_lo,
                         const Eigen::VectorXd& local_hi);

}  // namespace etopt

#endif  // ETOPT_GRAPH_HPP_
