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

// Multi-agent inverse dynamic game learning by feature-expectation matching.
//
// Each outer iteration sweeps the agents in order. For agent i the feature
// expectation is re-estimated under the current full weight set, and w^i
// takes one step of
//
//   w^i <- w^i - lr * (E_demo[phi^i] - E_model[phi^i])
//
// optionally with the gap divided elementwise by |E_demo[phi^i]|.

#ifndef ECE_IRL_HPP_
#define ECE_IRL_HPP_

#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "ece/features.hpp"
#include "ece/game.hpp"
#include "ece/ilq_ece.hpp"

namespace ece {

enum class LearnMode {
  kJoint,        // all agents solved together as a game
  kIndependent,  // each agent alone, the others replaying demo mean actions
};

struct LearnConfig {
  double learning_rate = 0.05;
  int samples = 50;
  int max_iterations = 200;
  // Stop once every agent's ||gap|| / ||E_demo[phi]|| is below this.
  double tolerance = 0.05;
  LearnMode mode = LearnMode::kJoint;
  std::uint64_t seed = 0;
  bool standardize = true;
  double effort_floor = 1e-3;
  // false: every estimate reuses the same sample seeds (common random
  // numbers); true: fresh seeds per outer iteration and agent.
  bool resample = false;

  void validate() const;
  bool operator==(const LearnConfig&) const = default;
};

// Everything about a game except the cost weights.
struct LearningProblem {
  int horizon = 1;
  std::shared_ptr<const DynamicsModel> dynamics;
  NoiseModel noise;
  InitialStateModel initial_state;
  std::vector<double> temperatures;
  FeatureBasis basis;
  SolverConfig solver;
};

GameSpec build_game(const LearningProblem& problem, const WeightVector& weights);

// Throws Error on an empty batch.
std::vector<Vec> empirical_feature_mean(const FeatureBasis& basis,
                                        const TrajectoryBatch& demos);

// The equilibrium solve failed under `weights()`.
class EquilibriumSolveError : public Error {
 public:
  EquilibriumSolveError(const std::string& what, WeightVector weights)
      : Error(what), weights_(std::move(weights)) {}
  const WeightVector& weights() const { return weights_; }

 private:
  WeightVector weights_;
};

struct FeatureExpectation {
  std::vector<Vec> means;             // per agent
  AffineGaussianPolicySet policies;   // for warm starts
  int solver_iterations = 0;
};

// Solves the ECE once under `weights`, samples `samples` rollouts with seeds
// seed, seed + 1, ... (s_1 drawn from p_1) and averages the feature sums.
FeatureExpectation estimate_feature_expectation(
    const LearningProblem& problem, const WeightVector& weights, int samples,
    std::uint64_t seed, const AffineGaussianPolicySet* warm_start = nullptr);

// Single-agent variant: agent `agent` plays alone while every other agent
// replays `fixed_actions` open loop. Only means[agent] is filled.
FeatureExpectation estimate_feature_expectation_independent(
    const LearningProblem& problem, const WeightVector& weights, int agent,
    const std::vector<JointAction>& fixed_actions, int samples, std::uint64_t seed,
    const AffineGaussianPolicySet* warm_start = nullptr);

// The plain update rule.
Vec update_weights(const Vec& weights, const Vec& demo_mean, const Vec& model_mean,
                   double learning_rate);

// Gap divided by |demo_mean| + 1e-8 before the step.
Vec update_weights_standardized(const Vec& weights, const Vec& demo_mean,
                                const Vec& model_mean, double learning_rate);

// ||demo - model|| / ||demo||.
double relative_residual(const Vec& demo_mean, const Vec& model_mean);

struct LearnRecord {
  int iteration = 0;
  int agent = 0;
  Vec weights;  // after the update
  Vec gap;      // E_demo - E_model before the update
  double residual = 0.0;
  int solver_iterations = 0;
  bool floor_applied = false;
};

struct LearnTrace {
  std::vector<LearnRecord> records;
};

struct LearnResult {
  WeightVector weights;
  LearnTrace trace;
  bool converged = false;
  int iterations = 0;
  std::vector<double> residuals;  // per agent, from the returned sweep
};

// Non-convergence is reported through `converged`; the weights are then the
// ones after the sweep with the smallest worst-agent residual.
LearnResult run_mairl(const LearningProblem& problem, const TrajectoryBatch& demos,
                      const WeightVector& init_weights, const LearnConfig& config);

// Per-time, per-agent mean demonstration actions.
std::vector<JointAction> mean_actions(const TrajectoryBatch& demos);

}  // namespace ece

#endif  // ECE_IRL_HPP_
