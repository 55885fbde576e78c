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

#include "ece/irl.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace ece {
namespace {

// Agent `agent` acts; everyone else replays a fixed open-loop sequence.
class ReplayOthersDynamics final : public DynamicsModel {
 public:
  ReplayOthersDynamics(std::shared_ptr<const DynamicsModel> full, int agent,
                       const std::vector<JointAction>& fixed)
      : full_(std::move(full)), agent_(agent), fixed_(fixed) {}

  int state_dim() const override { return full_->state_dim(); }
  std::vector<int> action_dims() const override {
    return {full_->action_dims()[agent_]};
  }
  Vec step(int t, const Vec& s, const JointAction& a) const override {
    return full_->step(t, s, expand(t, a));
  }
  LinearStage linearize(int t, const Vec& s, const JointAction& a) const override {
    LinearStage lin = full_->linearize(t, s, expand(t, a));
    return {std::move(lin.A), {std::move(lin.B[agent_])}};
  }

  JointAction expand(int t, const JointAction& a) const {
    JointAction joint = fixed_[t - 1];
    joint[agent_] = a.at(0);
    return joint;
  }

 private:
  std::shared_ptr<const DynamicsModel> full_;
  int agent_;
  const std::vector<JointAction>& fixed_;
};

class SingleAgentCost final : public CostModel {
 public:
  SingleAgentCost(std::shared_ptr<const CostModel> full, int agent)
      : full_(std::move(full)), R_{full_->action_weights()[agent]} {}

  double state_cost(int t, const Vec& s) const override { return full_->state_cost(t, s); }
  Vec state_gradient(int t, const Vec& s) const override {
    return full_->state_gradient(t, s);
  }
  Mat state_hessian(int t, const Vec& s) const override {
    return full_->state_hessian(t, s);
  }
  const std::vector<Mat>& action_weights() const override { return R_; }

 private:
  std::shared_ptr<const CostModel> full_;
  std::vector<Mat> R_;
};

// A warm start that fails is retried from the zero policy before giving up.
EceSolution solve_for_weights(const GameSpec& game, const SolverConfig& config,
                              const AffineGaussianPolicySet* warm_start,
                              const WeightVector& weights) {
  try {
    return solve_ece(game, warm_start, config);
  } catch (const Error& first) {
    if (warm_start != nullptr) {
      try {
        return solve_ece(game, nullptr, config);
      } catch (const Error&) {
      }
    }
    throw EquilibriumSolveError(std::string("equilibrium solve failed: ") + first.what(),
                                weights);
  }
}

int effort_feature(const FeatureBasis& basis, int agent) {
  const int k = basis.effort_index(agent);
  if (k < 0) throw InvalidWeightError("agent " + std::to_string(agent) + " has no effort feature");
  return k;
}

}  // namespace

void LearnConfig::validate() const {
  if (!(learning_rate >= 0.0)) throw ConfigError("learner.learning_rate must be >= 0");
  if (samples < 1) throw ConfigError("learner.samples must be >= 1");
  if (max_iterations < 1) throw ConfigError("learner.max_iterations must be >= 1");
  if (!(tolerance > 0.0)) throw ConfigError("learner.tolerance must be > 0");
  if (!(effort_floor > 0.0)) throw ConfigError("learner.effort_floor must be > 0");
}

GameSpec build_game(const LearningProblem& problem, const WeightVector& weights) {
  GameSpec game;
  game.horizon = problem.horizon;
  game.dynamics = problem.dynamics;
  game.noise = problem.noise;
  game.initial_state = problem.initial_state;
  game.temperatures = problem.temperatures;
  game.costs = make_cost_models(problem.basis, weights, problem.dynamics->action_dims());
  return game;
}

std::vector<Vec> empirical_feature_mean(const FeatureBasis& basis,
                                        const TrajectoryBatch& demos) {
  if (demos.empty()) throw Error("empirical feature mean of an empty batch");
  std::vector<Vec> mean = eval_features(basis, demos.front());
  for (std::size_t b = 1; b < demos.size(); ++b) {
    const auto sums = eval_features(basis, demos[b]);
    for (std::size_t i = 0; i < mean.size(); ++i) mean[i] += sums[i];
  }
  for (auto& m : mean) m /= static_cast<double>(demos.size());
  return mean;
}

std::vector<JointAction> mean_actions(const TrajectoryBatch& demos) {
  if (demos.empty()) throw Error("mean actions of an empty batch");
  std::vector<JointAction> mean = demos.front().actions;
  for (std::size_t b = 1; b < demos.size(); ++b) {
    for (std::size_t k = 0; k < mean.size(); ++k) {
      for (std::size_t i = 0; i < mean[k].size(); ++i) mean[k][i] += demos[b].actions[k][i];
    }
  }
  for (auto& step : mean) {
    for (auto& a : step) a /= static_cast<double>(demos.size());
  }
  return mean;
}

FeatureExpectation estimate_feature_expectation(const LearningProblem& problem,
                                                const WeightVector& weights, int samples,
                                                std::uint64_t seed,
                                                const AffineGaussianPolicySet* warm_start) {
  if (samples < 1) throw ConfigError("need at least one sample");
  const GameSpec game = build_game(problem, weights);
  EceSolution sol = solve_for_weights(game, problem.solver, warm_start, weights);

  PolicySampler sampler(game, sol.policies);
  FeatureExpectation out;
  for (int j = 0; j < samples; ++j) {
    const auto sums = eval_features(problem.basis, sampler.sample(seed + j));
    if (j == 0) {
      out.means = sums;
    } else {
      for (std::size_t i = 0; i < sums.size(); ++i) out.means[i] += sums[i];
    }
  }
  for (auto& m : out.means) m /= static_cast<double>(samples);
  out.solver_iterations = static_cast<int>(sol.trace.records.size());
  out.policies = std::move(sol.policies);
  return out;
}

FeatureExpectation estimate_feature_expectation_independent(
    const LearningProblem& problem, const WeightVector& weights, int agent,
    const std::vector<JointAction>& fixed_actions, int samples, std::uint64_t seed,
    const AffineGaussianPolicySet* warm_start) {
  if (samples < 1) throw ConfigError("need at least one sample");
  if (static_cast<int>(fixed_actions.size()) != problem.horizon) {
    throw ShapeError("replayed actions must cover the horizon");
  }
  const auto full_dims = problem.dynamics->action_dims();
  auto replay = std::make_shared<ReplayOthersDynamics>(problem.dynamics, agent, fixed_actions);

  GameSpec game;
  game.horizon = problem.horizon;
  game.dynamics = replay;
  game.noise = problem.noise;
  game.initial_state = problem.initial_state;
  game.temperatures = {problem.temperatures[agent]};
  game.costs = {std::make_shared<SingleAgentCost>(
      make_cost_model(problem.basis, weights, agent, full_dims), agent)};

  EceSolution sol = solve_for_weights(game, problem.solver, warm_start, weights);

  PolicySampler sampler(game, sol.policies);
  FeatureExpectation out;
  out.means.resize(problem.basis.num_agents());
  Vec sum = Vec::Zero(problem.basis.num_features(agent));
  for (int j = 0; j < samples; ++j) {
    Trajectory tr = sampler.sample(seed + j);
    for (int k = 0; k < tr.horizon(); ++k) tr.actions[k] = replay->expand(k + 1, tr.actions[k]);
    sum += eval_features(problem.basis, tr)[agent];
  }
  out.means[agent] = sum / static_cast<double>(samples);
  out.solver_iterations = static_cast<int>(sol.trace.records.size());
  out.policies = std::move(sol.policies);
  return out;
}

Vec update_weights(const Vec& weights, const Vec& demo_mean, const Vec& model_mean,
                   double learning_rate) {
  return weights - learning_rate * (demo_mean - model_mean);
}

Vec update_weights_standardized(const Vec& weights, const Vec& demo_mean,
                                const Vec& model_mean, double learning_rate) {
  const Vec scale = demo_mean.cwiseAbs().array() + 1e-8;
  return weights - learning_rate * ((demo_mean - model_mean).cwiseQuotient(scale));
}

double relative_residual(const Vec& demo_mean, const Vec& model_mean) {
  const double denom = demo_mean.norm();
  const double gap = (demo_mean - model_mean).norm();
  return denom > 0.0 ? gap / denom : gap;
}

LearnResult run_mairl(const LearningProblem& problem, const TrajectoryBatch& demos,
                      const WeightVector& init_weights, const LearnConfig& config) {
  config.validate();
  const FeatureBasis& basis = problem.basis;
  const int N = basis.num_agents();
  check_batch(demos, problem.dynamics->state_dim(), problem.dynamics->action_dims(),
              problem.horizon);
  if (static_cast<int>(init_weights.size()) != N) {
    throw ShapeError("one initial weight vector per agent required");
  }
  for (int i = 0; i < N; ++i) {
    if (init_weights[i].size() != basis.num_features(i)) {
      throw ShapeError("initial weights of agent " + std::to_string(i) +
                       " do not match its features");
    }
    if (!(init_weights[i](effort_feature(basis, i)) > config.effort_floor)) {
      throw InvalidWeightError("initial effort weight of agent " + std::to_string(i) +
                               " must exceed the floor");
    }
  }

  const std::vector<Vec> demo_mean = empirical_feature_mean(basis, demos);
  const std::vector<JointAction> replay =
      config.mode == LearnMode::kIndependent ? mean_actions(demos) : std::vector<JointAction>{};

  LearnResult result;
  WeightVector w = init_weights;
  std::optional<AffineGaussianPolicySet> joint_warm;
  std::vector<std::optional<AffineGaussianPolicySet>> agent_warm(N);

  double best_worst = std::numeric_limits<double>::infinity();
  WeightVector best_weights = w;
  std::vector<double> best_residuals(N, std::numeric_limits<double>::infinity());

  for (int it = 1; it <= config.max_iterations; ++it) {
    std::vector<double> residuals(N);
    for (int i = 0; i < N; ++i) {
      const std::uint64_t seed =
          config.resample ? config.seed + 1000003ULL * it + 7919ULL * i : config.seed;
      FeatureExpectation est;
      if (config.mode == LearnMode::kJoint) {
        est = estimate_feature_expectation(problem, w, config.samples, seed,
                                           joint_warm ? &*joint_warm : nullptr);
        joint_warm = std::move(est.policies);
      } else {
        est = estimate_feature_expectation_independent(
            problem, w, i, replay, config.samples, seed,
            agent_warm[i] ? &*agent_warm[i] : nullptr);
        agent_warm[i] = std::move(est.policies);
      }

      LearnRecord rec;
      rec.iteration = it;
      rec.agent = i;
      rec.gap = demo_mean[i] - est.means[i];
      rec.residual = relative_residual(demo_mean[i], est.means[i]);
      rec.solver_iterations = est.solver_iterations;
      residuals[i] = rec.residual;

      w[i] = config.standardize
                 ? update_weights_standardized(w[i], demo_mean[i], est.means[i],
                                               config.learning_rate)
                 : update_weights(w[i], demo_mean[i], est.means[i], config.learning_rate);
      const int e = effort_feature(basis, i);
      if (w[i](e) < config.effort_floor) {
        w[i](e) = config.effort_floor;
        rec.floor_applied = true;
      }
      rec.weights = w[i];
      result.trace.records.push_back(std::move(rec));
    }

    result.iterations = it;
    const double worst = *std::max_element(residuals.begin(), residuals.end());
    if (worst < best_worst) {
      best_worst = worst;
      best_weights = w;
      best_residuals = residuals;
    }
    if (worst < config.tolerance) {
      result.converged = true;
      result.weights = w;
      result.residuals = residuals;
      return result;
    }
  }
  result.weights = best_weights;
  result.residuals = best_residuals;
  return result;
}

}  // namespace ece
