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
// File formats: problem documents (JSON: objectives[] with quadratic
// coefficients, constraints.C row-major, constraints.d, optional
// normalize=true) and graph edge lists ("i j" per line, 1-based).

#ifndef ETOPT_IO_HPP_
#define ETOPT_IO_HPP_

#include <iosfwd>
#include <string>

#include "etopt/graph.hpp"
#include "etopt/problem.hpp"

namespace etopt {

// Parses a problem document. Custom objectives are not expressible in
// files; only kind == "quadratic" is accepted. When the document sets
// normalize=true the constraints are scaled to rho(C^T C) = 1 on load.
ProblemInstance load_problem(const std::string& path);
ProblemInstance parse_problem(std::istream& in);

// Serializes a quadratic problem (used by manifests and tests).
std::string problem_to_json(const ProblemInstance& p);

// Edge-list graph files. Vertex count is the largest index seen unless the
// optional first line "n <count>" pins it.
Graph load_graph(const std::string& path);
Graph parse_graph(std::istream& in);
void save_graph(const Graph& g, const std::string& path);

}  // namespace etopt

#endif  // ETOPT_IO_HPP_
