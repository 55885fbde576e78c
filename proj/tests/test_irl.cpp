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

#include <gtest/gtest.h>

#include <cmath>

#include "ece/config.hpp"
#include "ece/dynamics.hpp"
#include "ece/irl.hpp"
#include "test_util.hpp"

namespace ece {
namespace {

using testing::scalar;
using testing::vec1;

// Scalar integrator s' = s + 0.5 a with tracking toward 0 from 2 and effort.
LearningProblem scalar_problem(int T, double noise_var, double temperature) {
  LearningProblem p;
  p.horizon = T;
  p.dynamics = std::make_shared<LinearDynamics>(scalar(1.0), std::vector<Mat>{scalar(0.5)});
  p.noise = NoiseModel(scalar(1), scalar(noise_var));
  p.initial_state = InitialStateModel(vec1(2.0));
  p.temperatures = {temperature};
  p.basis = FeatureBasis(T, {{{0}, {FeatureDescriptor::tracking(vec1(2.0), vec1(0.0)),
                                    FeatureDescriptor::effort()}}});
  return p;
}

TrajectoryBatch sample_demos(const LearningProblem& p, const WeightVector& w, int count,
                             std::uint64_t seed) {
  const GameSpec g = build_game(p, w);
  const EceSolution sol = solve_ece(g, nullptr, p.solver);
  return PolicySampler(g, sol.policies).sample_batch(count, seed);
}

Trajectory simple_trajectory(double a) {
  Trajectory tr;
  tr.states = {vec1(2.0), vec1(1.0)};
  tr.actions = {{vec1(a)}, {vec1(a)}};
  return tr;
}

TEST(EmpiricalFeatureMean, SingleTrajectoryIsItsFeatureSum) {
  const LearningProblem p = scalar_problem(2, 0.0, 1.0);
  const Trajectory tr = simple_trajectory(0.5);
  const auto mean = empirical_feature_mean(p.basis, {tr});
  EXPECT_EQ(mean[0], eval_features(p.basis, tr)[0]);
}

TEST(EmpiricalFeatureMean, ArithmeticMeanAndOrderInvariance) {
  const LearningProblem p = scalar_problem(2, 0.0, 1.0);
  // Effort sums 2 * a^2: a = 1 -> 2, a = sqrt(2) -> 4.
  const TrajectoryBatch b{simple_trajectory(1.0), simple_trajectory(std::sqrt(2.0))};
  const auto m = empirical_feature_mean(p.basis, b);
  EXPECT_NEAR(m[0](1), 3.0, 1e-14);
  const TrajectoryBatch r{b[1], b[0]};
  EXPECT_NEAR((empirical_feature_mean(p.basis, r)[0] - m[0]).norm(), 0.0, 1e-14);
  EXPECT_THROW(empirical_feature_mean(p.basis, {}), Error);
}

TEST(EstimateFeatureExpectation, DegenerateSamplingMatchesMeanRollout) {
  const LearningProblem p = scalar_problem(6, 0.0, 1e-14);
  const WeightVector w{(Vec(2) << 1.0, 0.5).finished()};
  const FeatureExpectation est = estimate_feature_expectation(p, w, 1, 7);
  const GameSpec g = build_game(p, w);
  const EceSolution sol = solve_ece(g, nullptr, p.solver);
  const auto phi = eval_features(p.basis, sol.nominal)[0];
  EXPECT_LT((est.means[0] - phi).cwiseAbs().maxCoeff(), 1e-5);
}

TEST(EstimateFeatureExpectation, DeterministicGivenSeed) {
  const LearningProblem p = scalar_problem(6, 0.01, 0.3);
  const WeightVector w{(Vec(2) << 1.0, 0.5).finished()};
  const auto a = estimate_feature_expectation(p, w, 20, 99);
  const auto b = estimate_feature_expectation(p, w, 20, 99);
  EXPECT_EQ(a.means[0], b.means[0]);
}

TEST(EstimateFeatureExpectation, EffortMatchesGaussianMoments) {
  const int T = 5;
  const double W = 0.02;
  const LearningProblem p = scalar_problem(T, W, 0.4);
  const WeightVector w{(Vec(2) << 1.0, 0.7).finished()};
  const GameSpec g = build_game(p, w);
  const EceSolution sol = solve_ece(g, nullptr, p.solver);

  // Propagate mean and variance of s under a = -P s - alpha + eps.
  double m = 2.0, v = 0.0, expected = 0.0;
  for (int k = 0; k < T; ++k) {
    const double P = sol.policies.stages[k][0].gain(0, 0);
    const double al = sol.policies.global_offset(k, 0)(0);
    const double S = sol.policies.stages[k][0].covariance(0, 0);
    const double mu = -P * m - al;
    expected += mu * mu + P * P * v + S;
    const double F = 1.0 - 0.5 * P;
    m = F * m - 0.5 * al;
    v = F * F * v + 0.25 * S + W;
  }

  const int samples = 2000;
  PolicySampler sampler(g, sol.policies);
  double sum = 0.0, sq = 0.0;
  for (int j = 0; j < samples; ++j) {
    const double e = eval_features(p.basis, sampler.sample(500 + j))[0](1);
    sum += e;
    sq += e * e;
  }
  const double mean = sum / samples;
  const double se = std::sqrt((sq / samples - mean * mean) / samples);
  EXPECT_LT(std::abs(mean - expected), 3.0 * se) << "mean " << mean << " expected " << expected;

  const FeatureExpectation est = estimate_feature_expectation(p, w, samples, 500);
  EXPECT_NEAR(est.means[0](1), mean, 1e-12);
}

TEST(UpdateWeights, PlainAndStandardizedRules) {
  const Vec w = (Vec(3) << 1.0, 2.0, 3.0).finished();
  const Vec demo = (Vec(3) << 0.5, 1.0, 0.2).finished();
  EXPECT_EQ(update_weights(w, demo, demo, 0.3), w);
  EXPECT_EQ(update_weights(w, demo, Vec::Zero(3), 0.0), w);
  // Model proximity above the demo: the proximity weight rises.
  Vec model = demo;
  model(2) = 0.6;
  const Vec next = update_weights(w, demo, model, 0.5);
  EXPECT_GT(next(2), w(2));
  EXPECT_DOUBLE_EQ(next(2), 3.0 - 0.5 * (0.2 - 0.6));
  EXPECT_EQ(update_weights_standardized(w, demo, demo, 0.3), w);
  const Vec std_next = update_weights_standardized(w, demo, model, 0.5);
  EXPECT_NEAR(std_next(2), 3.0 - 0.5 * (0.2 - 0.6) / (0.2 + 1e-8), 1e-12);
}

TEST(RelativeResidual, Definition) {
  const Vec demo = (Vec(2) << 3.0, 4.0).finished();
  EXPECT_DOUBLE_EQ(relative_residual(demo, demo), 0.0);
  EXPECT_DOUBLE_EQ(relative_residual(demo, Vec::Zero(2)), 1.0);
}

TEST(RunMairl, StartingAtTruthIsAlreadyMatched) {
  const LearningProblem p = scalar_problem(8, 0.01, 0.2);
  const WeightVector truth{(Vec(2) << 1.0, 0.6).finished()};
  const TrajectoryBatch demos = sample_demos(p, truth, 400, 1);
  LearnConfig cfg;
  cfg.samples = 400;
  cfg.seed = 1;
  cfg.max_iterations = 5;
  const LearnResult r = run_mairl(p, demos, truth, cfg);
  EXPECT_TRUE(r.converged);
  EXPECT_EQ(r.iterations, 1);
  EXPECT_LT(r.trace.records.front().residual, 1e-12);
  EXPECT_LT((r.weights[0] - truth[0]).norm(), 1e-9);
}

TEST(RunMairl, SingleAgentRecoversFeatureMeans) {
  const LearningProblem p = scalar_problem(10, 0.01, 0.2);
  const WeightVector truth{(Vec(2) << 2.0, 0.5).finished()};
  const TrajectoryBatch demos = sample_demos(p, truth, 300, 1);
  LearnConfig cfg;
  cfg.learning_rate = 0.1;
  cfg.samples = 300;
  cfg.seed = 77;
  cfg.tolerance = 0.01;
  cfg.max_iterations = 300;
  const LearnResult r = run_mairl(p, demos, {Vec::Ones(2)}, cfg);
  EXPECT_TRUE(r.converged);
  const auto demo_mean = empirical_feature_mean(p.basis, demos)[0];
  const auto fresh = estimate_feature_expectation(p, r.weights, 2000, 123456).means[0];
  for (int k = 0; k < 2; ++k) {
    EXPECT_LT(std::abs(fresh(k) - demo_mean(k)) / demo_mean(k), 0.05) << "feature " << k;
  }
}

TEST(RunMairl, ResidualTrendsDown) {
  const LearningProblem p = scalar_problem(10, 0.01, 0.2);
  const WeightVector truth{(Vec(2) << 2.0, 0.5).finished()};
  const TrajectoryBatch demos = sample_demos(p, truth, 200, 3);
  LearnConfig cfg;
  cfg.learning_rate = 0.05;
  cfg.samples = 30;
  cfg.tolerance = 1e-6;
  cfg.max_iterations = 40;
  cfg.resample = true;
  const LearnResult r = run_mairl(p, demos, {(Vec(2) << 0.2, 3.0).finished()}, cfg);
  ASSERT_GE(r.trace.records.size(), 20u);
  auto window = [&](std::size_t from) {
    double s = 0.0;
    for (std::size_t k = from; k < from + 10; ++k) s += r.trace.records[k].residual;
    return s / 10.0;
  };
  EXPECT_LT(window(r.trace.records.size() - 10), window(0));
}

TEST(RunMairl, DeterministicGivenSeed) {
  const LearningProblem p = scalar_problem(6, 0.01, 0.3);
  const TrajectoryBatch demos = sample_demos(p, {(Vec(2) << 1.5, 0.4).finished()}, 50, 5);
  LearnConfig cfg;
  cfg.samples = 10;
  cfg.max_iterations = 15;
  cfg.resample = true;
  cfg.seed = 4;
  const LearnResult a = run_mairl(p, demos, {Vec::Ones(2)}, cfg);
  const LearnResult b = run_mairl(p, demos, {Vec::Ones(2)}, cfg);
  ASSERT_EQ(a.trace.records.size(), b.trace.records.size());
  EXPECT_EQ(a.weights[0], b.weights[0]);
  for (std::size_t k = 0; k < a.trace.records.size(); ++k) {
    EXPECT_EQ(a.trace.records[k].gap, b.trace.records[k].gap);
  }
}

TEST(RunMairl, IndependentEqualsJointForOneAgent) {
  const LearningProblem p = scalar_problem(6, 0.01, 0.3);
  const TrajectoryBatch demos = sample_demos(p, {(Vec(2) << 1.5, 0.4).finished()}, 50, 5);
  LearnConfig cfg;
  cfg.samples = 20;
  cfg.max_iterations = 10;
  cfg.seed = 9;
  const LearnResult joint = run_mairl(p, demos, {Vec::Ones(2)}, cfg);
  cfg.mode = LearnMode::kIndependent;
  const LearnResult indep = run_mairl(p, demos, {Vec::Ones(2)}, cfg);
  EXPECT_EQ(joint.weights[0], indep.weights[0]);
  EXPECT_EQ(joint.iterations, indep.iterations);
}

TEST(RunMairl, EffortFloorIsEnforcedAndFlagged) {
  const LearningProblem p = scalar_problem(6, 0.01, 0.3);
  // Demos with much more effort than the model produces push w_effort down.
  const TrajectoryBatch demos = sample_demos(p, {(Vec(2) << 1.0, 0.05).finished()}, 50, 5);
  LearnConfig cfg;
  cfg.learning_rate = 5.0;
  cfg.samples = 20;
  cfg.max_iterations = 3;
  const LearnResult r = run_mairl(p, demos, {(Vec(2) << 1.0, 1.0).finished()}, cfg);
  bool flagged = false;
  for (const auto& rec : r.trace.records) {
    EXPECT_GE(rec.weights(1), cfg.effort_floor);
    flagged = flagged || rec.floor_applied;
  }
  EXPECT_TRUE(flagged);
}

TEST(RunMairl, SolverFailureCarriesWeights) {
  ScenarioConfig cfg = load_scenario(ECE_SCENARIO_DIR "/crossing.json");
  cfg.solver.max_iterations = 1;
  const LearningProblem p = build_problem(cfg);
  const WeightVector w = true_weights(cfg);
  try {
    estimate_feature_expectation(p, w, 5, 1);
    FAIL() << "expected EquilibriumSolveError";
  } catch (const EquilibriumSolveError& e) {
    ASSERT_EQ(e.weights().size(), 2u);
    EXPECT_EQ(e.weights()[0], w[0]);
  }
}

TEST(LearnConfig, Validation) {
  LearnConfig cfg;
  EXPECT_NO_THROW(cfg.validate());
  cfg.samples = 0;
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg = LearnConfig{};
  cfg.learning_rate = -1.0;
  EXPECT_THROW(cfg.validate(), ConfigError);
}

}  // namespace
}  // namespace ece
