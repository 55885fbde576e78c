// Copyright 2026 The ECE Authors.
//
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

#ifndef ECE_TYPES_HPP_
#define ECE_TYPES_HPP_

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace ece {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// One action vector per agent, indexed by agent.
using JointAction = std::vector<Vec>;

// The one engine behind all library sampling.
using Rng = std::mt19937_64;

// Base class for every error the library throws.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ShapeError : public Error {
 public:
  using Error::Error;
};

// A rollout produced a non-finite state.
class DivergenceError : public Error {
 public:
  DivergenceError(const std::string& what, int time_step)
      : Error(what), time_step_(time_step) {}
  int time_step() const { return time_step_; }

 private:
  int time_step_;
};

// A covariance that must be positive definite is not. Indices are -1 when
// they do not apply.
class CovarianceError : public Error {
 public:
  CovarianceError(const std::string& what, int agent, int time_step)
      : Error(what), agent_(agent), time_step_(time_step) {}
  int agent() const { return agent_; }
  int time_step() const { return time_step_; }

 private:
  int agent_;
  int time_step_;
};

class StageSingularError : public Error {
 public:
  StageSingularError(const std::string& what, int time_step)
      : Error(what), time_step_(time_step) {}
  int time_step() const { return time_step_; }

 private:
  int time_step_;
};

// Non-finite derivative information while building the LQ approximation.
class ApproximationError : public Error {
 public:
  ApproximationError(const std::string& what, int time_step)
      : Error(what), time_step_(time_step) {}
  int time_step() const { return time_step_; }

 private:
  int time_step_;
};

class InvalidWeightError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

// Malformed trajectory or policy input. `line` is 0 when not line-specific.
class IngestError : public Error {
 public:
  IngestError(const std::string& what, int line = 0)
      : Error(what), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

inline bool all_finite(const Vec& v) { return v.allFinite(); }

}  // namespace ece

#endif  // ECE_TYPES_HPP_
