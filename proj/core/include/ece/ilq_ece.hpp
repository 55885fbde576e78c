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

// Approximate entropic cost equilibria of nonlinear games by repeated
// linearize / quadratize / LQ-solve / damped rollout around a nominal mean
// trajectory.

#ifndef ECE_ILQ_ECE_HPP_
#define ECE_ILQ_ECE_HPP_

#include <vector>

#include "ece/game.hpp"
#include "ece/lq_ece.hpp"

namespace ece {

struct SolverConfig {
  int max_iterations = 100;
  // Max over t of ||s_t - s_t'|| between successive mean trajectories.
  double convergence_tol = 1e-4;
  // Line search accepts a step once the new mean trajectory stays within this
  // distance of the nominal at every t.
  double line_search_threshold = 100.0;
  double min_step = 1.0 / 64.0;
  // Eigenvalues of state Hessians below zero are raised to this value.
  double hessian_floor = 1e-6;
  bool strict_paper = false;

  void validate() const;
  bool operator==(const SolverConfig&) const = default;
};

struct IterationRecord {
  int iteration = 0;
  double max_deviation = 0.0;  // new mean trajectory vs. nominal
  double step = 1.0;           // accepted epsilon
  Vec costs;                   // per-agent cost along the nominal
};

struct IterationTrace {
  std::vector<IterationRecord> records;
};

class NonConvergenceError : public Error {
 public:
  NonConvergenceError(const std::string& what, IterationTrace trace)
      : Error(what), trace_(std::move(trace)) {}
  const IterationTrace& trace() const { return trace_; }

 private:
  IterationTrace trace_;
};

class LineSearchError : public Error {
 public:
  LineSearchError(const std::string& what, IterationTrace trace)
      : Error(what), trace_(std::move(trace)) {}
  const IterationTrace& trace() const { return trace_; }

 private:
  IterationTrace trace_;
};

// Dynamics Jacobians along the nominal for t = 1..T-1.
std::vector<LinearStage> linearize(const GameSpec& game, const Trajectory& nominal);

struct StateQuadratic {
  Mat Q;                // PSD-projected Hessian of v^i at sbar_t
  Vec l;                // gradient of v^i at sbar_t
  std::vector<Vec> r;   // linear action terms r^{ij}, zero in strict mode
};

// Per time step, per agent quadratic model of the stage cost around the
// nominal, in the LQ Taylor convention (action Hessian 2 R^{ij}).
std::vector<std::vector<StateQuadratic>> quadratize(const GameSpec& game,
                                                    const Trajectory& nominal,
                                                    const SolverConfig& config);

// Delta-variable LQ game around the nominal.
LqStageGame approximate_lq(const GameSpec& game, const Trajectory& nominal,
                           const SolverConfig& config);

// Eigenvalue clamp: returns H unchanged when it is PSD up to rounding.
Mat project_psd(const Mat& H, double floor);

struct EceSolution {
  AffineGaussianPolicySet policies;  // expressed around `nominal`
  Trajectory nominal;                // converged mean trajectory
  IterationTrace trace;
  ValueRecursion values;
};

// Throws NonConvergenceError after max_iterations, LineSearchError when no
// step >= min_step stays within the line-search threshold.
EceSolution solve_ece(const GameSpec& game, const AffineGaussianPolicySet* init,
                      const SolverConfig& config);

}  // namespace ece

#endif  // ECE_ILQ_ECE_HPP_
