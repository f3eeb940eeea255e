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

#include "etopt/graph.hpp"

#include <algorithm>
#include <deque>
#include <sstream>

namespace etopt {

namespace {
std::pair<int, int> ordered(int i, int j) { return {std::min(i, j), std::max(i, j)}; }
}  // namespace

Graph::Graph(int n_vertices, const std::set<std::pair<int, int>>& edges) : n_(n_vertices) {
  if (n_ <= 0) throw ContractViolationError("graph needs at least one vertex");
  adj_.resize(static_cast<size_t>(n_));
  for (auto [i, j] : edges) {
    if (i == j) throw ContractViolationError("self-loop at vertex " + std::to_string(i + 1));
    if (i < 0 || j < 0 || i >= n_ || j >= n_) {
      throw ContractViolationError("edge endpoint out of range");
    }
    edges_.insert(ordered(i, j));
  }
  for (auto [i, j] : edges_) {
    adj_[static_cast<size_t>(i)].push_back(j);
    adj_[static_cast<size_t>(j)].push_back(i);
  }
  for (auto& a : adj_) std::sort(a.begin(), a.end());
}

Graph Graph::Complete(int n_vertices) {
  std::set<std::pair<int, int>> e;
  for (int i = 0; i < n_vertices; ++i)
    for (int j = i + 1; j < n_vertices; ++j) e.insert({i, j});
  return Graph(n_vertices, e);
}

Graph Graph::RingWithChords(int n_vertices, const std::set<std::pair<int, int>>& chords) {
  std::set<std::pair<int, int>> e;
  for (int i = 0; i < n_vertices; ++i) e.insert(ordered(i, (i + 1) % n_vertices));
  for (auto [i, j] : chords) e.insert(ordered(i, j));
  return Graph(n_vertices, e);
}

bool Graph::has_edge(int i, int j) const { return edges_.count(ordered(i, j)) > 0; }

bool Graph::connected() const {
  std::vector<char> seen(static_cast<size_t>(n_), 0);
  std::deque<int> q{0};
  seen[0] = 1;
  int count = 1;
  while (!q.empty()) {
    int v = q.front();
    q.pop_front();
    for (int w : adj_[static_cast<size_t>(v)]) {
      if (!seen[static_cast<size_t>(w)]) {
        seen[static_cast<size_t>(w)] = 1;
        ++count;
        q.push_back(w);
      }
    }
  }
  return count == n_;
}

int Graph::diameter() const {
  int best = 0;
  for (int s = 0; s < n_; ++s) {
    std::vector<int> dist(static_cast<size_t>(n_), -1);
    std::deque<int> q{s};
    dist[static_cast<size_t>(s)] = 0;
    while (!q.empty()) {
      int v = q.front();
      q.pop_front();
      for (int w : adj_[static_cast<size_t>(v)]) {
        if (dist[static_cast<size_t>(w)] < 0) {
          dist[static_cast<size_t>(w)] = dist[static_cast<size_t>(v)] + 1;
          q.push_back(w);
        }
      }
    }
    for (int d : dist) {
      if (d < 0) throw ContractViolationError("diameter of a disconnected graph");
      best = std::max(best, d);
    }
  }
  return best;
}

Graph Graph::without_vertices(const std::vector<int>& victims) const {
  std::set<std::pair<int, int>> e = edges_;
  for (int v : victims) {
    for (auto it = e.begin(); it != e.end();) {
      if (it->first == v || it->second == v) it = e.erase(it);
      else ++it;
    }
  }
  return Graph(n_, e);
}

bool AugmentedNetwork::connected() const {
  const int total_n = total();
  std::vector<char> seen(static_cast<size_t>(total_n), 0);
  std::deque<int> q{0};
  seen[0] = 1;
  int count = 1;
  while (!q.empty()) {
    int v = q.front();
    q.pop_front();
    for (int w : neighbors[static_cast<size_t>(v)]) {
      if (!seen[static_cast<size_t>(w)]) {
        seen[static_cast<size_t>(w)] = 1;
        ++count;
        q.push_back(w);
      }
    }
  }
  return count == total_n;
}

bool check_compatibility(const Graph& g, const ConstraintSystem& cs) {
  const Eigen::Index m = cs.rows();
  const Eigen::Index n = cs.cols();
  for (Eigen::Index l = 0; l < m; ++l) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (cs.C(l, j) == 0.0) continue;
      for (Eigen::Index k = j + 1; k < n; ++k) {
        if (cs.C(l, k) == 0.0) continue;
        if (!g.has_edge(static_cast<int>(j), static_cast<int>(k))) return false;
      }
    }
  }
  return true;
}

AugmentedNetwork build_augmented(const Graph& g, const ConstraintSystem& cs,
                                 bool enforce_compatibility) {
  const int n = static_cast<int>(cs.cols());
  const int m = static_cast<int>(cs.rows());
  if (g.n_vertices() != n) {
    throw ContractViolationError("graph vertex count does not match constraint columns");
  }
  if (enforce_compatibility) {
    for (int l = 0; l < m; ++l) {
      for (int j = 0; j < n; ++j) {
        if (cs.C(l, j) == 0.0) continue;
        for (int k = j + 1; k < n; ++k) {
          if (cs.C(l, k) == 0.0) continue;
          if (!g.has_edge(j, k)) {
            std::ostringstream os;
            os << "constraint row " << (l + 1) << " couples agents " << (j + 1) << " and "
               << (k + 1) << " but they share no edge";
            throw ContractViolationError(os.str());
          }
        }
      }
    }
  }

  AugmentedNetwork net;
  net.n_real = n;
  net.n_virtual = m;
  net.neighbors.assign(static_cast<size_t>(n + m), {});
  net.adjacency_mu = Eigen::MatrixXi::Zero(n, m);
  net.host_of_virtual.assign(static_cast<size_t>(m), -1);

  for (auto [i, j] : g.edges()) {
    net.neighbors[static_cast<size_t>(i)].push_back(j);
    net.neighbors[static_cast<size_t>(j)].push_back(i);
  }
  for (int l = 0; l < m; ++l) {
    int host = -1;
    for (int i = 0; i < n; ++i) {
      if (cs.C(l, i) != 0.0) {
        net.adjacency_mu(i, l) = 1;
        net.neighbors[static_cast<size_t>(i)].push_back(n + l);
        net.neighbors[static_cast<size_t>(n + l)].push_back(i);
        if (host < 0) host = i;
      }
    }
    if (host < 0) {
      throw ContractViolationError("constraint row " + std::to_string(l + 1) +
                                   " is identically zero");
    }
    net.host_of_virtual[static_cast<size_t>(l)] = host;
  }
  for (auto& a : net.neighbors) std::sort(a.begin(), a.end());
  return net;
}

FloodResult flood_bounds(const Graph& g, const Eigen::VectorXd& local_lo,
                         const Eigen::VectorXd& local_hi) {
  const int n = g.n_vertices();
  if (local_lo.size() != n || local_hi.size() != n) {
    throw ContractViolationError("flood_bounds: vector length does not match vertex count");
  }
  if (!g.connected()) throw ContractViolationError("flood_bounds: graph must be connected");

  const double true_lo = local_lo.minCoeff();
  const double true_hi = local_hi.maxCoeff();
  Eigen::VectorXd lo = local_lo, hi = local_hi;
  int rounds = 0;
  const int max_rounds = n;  // diameter <= n - 1
  auto settled = [&]() {
    return (lo.array() == true_lo).all() && (hi.array() == true_hi).all();
  };
  while (!settled()) {
    if (rounds >= max_rounds) {
      throw ContractViolationError("flood_bounds failed to settle within n rounds");
    }
    Eigen::VectorXd nlo = lo, nhi = hi;
    for (int v = 0; v < n; ++v) {
      for (int w : g.neighbors(v)) {
        nlo[v] = std::min(nlo[v], lo[w]);
        nhi[v] = std::max(nhi[v], hi[w]);
      }
    }
    lo.swap(nlo);
    hi.swap(nhi);
    ++rounds;
  }
  return FloodResult{true_lo, true_hi, rounds};
}

}  // namespace etopt
