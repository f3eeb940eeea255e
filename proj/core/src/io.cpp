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

#include "etopt/io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace etopt {

using nlohmann::json;

ProblemInstance parse_problem(std::istream& in) {
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw InvalidProblemError(std::string("problem file is not valid JSON: ") + e.what());
  }
  if (!doc.contains("objectives") || !doc.contains("constraints")) {
    throw InvalidProblemError("problem file needs 'objectives' and 'constraints'");
  }
  std::vector<ScalarObjective> objectives;
  for (const auto& o : doc["objectives"]) {
    const std::string kind = o.value("kind", "quadratic");
    if (kind != "quadratic") {
      throw InvalidProblemError("problem files support only quadratic objectives, got kind '" +
                                kind + "'");
    }
    objectives.push_back(ScalarObjective::Quadratic(o.at("a").get<double>(),
                                                    o.value("b", 0.0), o.value("c", 0.0)));
  }
  const auto& cj = doc["constraints"];
  const auto& rows = cj.at("C");
  const auto m = static_cast<Eigen::Index>(rows.size());
  if (m == 0) throw InvalidProblemError("problem file has an empty constraint matrix");
  const auto n = static_cast<Eigen::Index>(rows[0].size());
  ConstraintSystem cs;
  cs.C = Eigen::MatrixXd::Zero(m, n);
  for (Eigen::Index i = 0; i < m; ++i) {
    if (static_cast<Eigen::Index>(rows[static_cast<size_t>(i)].size()) != n) {
      throw InvalidProblemError("constraint rows have inconsistent lengths");
    }
    for (Eigen::Index j = 0; j < n; ++j) {
      cs.C(i, j) = rows[static_cast<size_t>(i)][static_cast<size_t>(j)].get<double>();
    }
  }
  const auto& dj = cj.at("d");
  if (static_cast<Eigen::Index>(dj.size()) != m) {
    throw InvalidProblemError("constraint right-hand side length mismatch");
  }
  cs.d = Eigen::VectorXd::Zero(m);
  for (Eigen::Index i = 0; i < m; ++i) cs.d[i] = dj[static_cast<size_t>(i)].get<double>();

  if (doc.value("normalize", false)) {
    cs = normalize_constraints(cs);
  }
  return ProblemInstance(std::move(objectives), std::move(cs));
}

ProblemInstance load_problem(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidProblemError("cannot open problem file: " + path);
  return parse_problem(in);
}

std::string problem_to_json(const ProblemInstance& p) {
  json doc;
  for (const auto& o : p.objectives()) {
    if (!o.is_quadratic()) {
      throw ContractViolationError("custom objectives are not serializable");
    }
    doc["objectives"].push_back({{"kind", "quadratic"},
                                 {"a", o.quad_a()},
                                 {"b", o.quad_b()},
                                 {"c", o.quad_c()}});
  }
  const auto& cs = p.constraints();
  for (Eigen::Index i = 0; i < cs.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < cs.cols(); ++j) row.push_back(cs.C(i, j));
    doc["constraints"]["C"].push_back(row);
  }
  for (Eigen::Index i = 0; i < cs.rows(); ++i) doc["constraints"]["d"].push_back(cs.d[i]);
  doc["normalized"] = cs.normalized;
  return doc.dump(2);
}

Graph parse_graph(std::istream& in) {
  std::set<std::pair<int, int>> edges;
  int n = 0;
  bool n_pinned = false;
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string first;
    if (!(ls >> first)) continue;      // blank line
    if (first[0] == '#') continue;     // comment
    if (first == "n") {
      ls >> n;
      n_pinned = true;
      continue;
    }
    int i = std::stoi(first);
    int j = 0;
    if (!(ls >> j)) throw ContractViolationError("graph file: malformed edge line '" + line + "'");
    if (i < 1 || j < 1) throw ContractViolationError("graph file vertices are 1-based");
    edges.insert({std::min(i, j) - 1, std::max(i, j) - 1});
    n = std::max({n, i, j});
  }
  if (n == 0) throw ContractViolationError("graph file contains no vertices");
  if (n_pinned) {
    for (auto [i, j] : edges) {
      if (j >= n) throw ContractViolationError("graph file edge exceeds pinned vertex count");
    }
  }
  return Graph(n, edges);
}

Graph load_graph(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ContractViolationError("cannot open graph file: " + path);
  return parse_graph(in);
}

void save_graph(const Graph& g, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ContractViolationError("cannot write graph file: " + path);
  out << "n " << g.n_vertices() << "\n";
  for (auto [i, j] : g.edges()) out << (i + 1) << " " << (j + 1) << "\n";
}

}  // namespace etopt
