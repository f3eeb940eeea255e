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

#ifndef ETOPT_ERRORS_HPP_
#define ETOPT_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace etopt {

// Base class for all etopt errors. The CLI maps subclasses to exit codes.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Malformed or mathematically unusable problem data (zero constraint
// matrix, non-convex quadratic, dimension mismatch at construction).
class InvalidProblemError : public Error {
 public:
  using Error::Error;
};

// Constraint system has no feasible point.
class InfeasibleError : public Error {
 public:
  using Error::Error;
};

// The direct KKT oracle was asked for something outside its scope.
class OracleUnsupportedError : public Error {
 public:
  using Error::Error;
};

// An operation was called with arguments violating its contract
// (dimension mismatches and similar caller bugs).
class ContractViolationError : public Error {
 public:
  using Error::Error;
};

// Simulated state left the finite/bounded region.
class DivergenceError : public Error {
 public:
  using Error::Error;
};

// Scenario construction or perturbation failed (e.g. a bus disconnect
// that would disconnect the residual communication graph).
class ScenarioError : public Error {
 public:
  using Error::Error;
};

// Bad run configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace etopt

#endif  // ETOPT_ERRORS_HPP_
