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

#include "ece/dynamics.hpp"
#include "ece/features.hpp"
#include "ece/game.hpp"
#include "test_util.hpp"

namespace ece {
namespace {

using testing::constant_policy;
using testing::linear_game;
using testing::scalar;
using testing::vec1;

GameSpec scalar_integrator(int T) {
  return linear_game(scalar(1), {scalar(1)}, {scalar(1)}, {vec1(0)}, {{scalar(1)}}, T, vec1(1));
}

TEST(SimulateMean, ZeroDynamicsGivesZeroStates) {
  GameSpec g = linear_game(Mat::Zero(2, 2), {Mat::Zero(2, 1)}, {Mat::Identity(2, 2)},
                           {Vec::Zero(2)}, {{scalar(1)}}, 4, Vec::Ones(2));
  auto pol = constant_policy(2, {1}, 4, {Mat::Ones(1, 2)}, {vec1(0.3)}, {scalar(1)});
  const Trajectory tr = simulate_mean(g, pol, Vec::Ones(2));
  for (int k = 1; k < 4; ++k) EXPECT_TRUE(tr.states[k].isZero(0.0));
}

TEST(SimulateMean, ZeroActionKeepsState) {
  const GameSpec g = scalar_integrator(3);
  const auto pol = AffineGaussianPolicySet::zeros(1, {1}, 3);
  const Trajectory tr = simulate_mean(g, pol, vec1(1));
  ASSERT_EQ(tr.horizon(), 3);
  for (const auto& s : tr.states) EXPECT_EQ(s(0), 1.0);
}

TEST(SimulateMean, HalfGainHandRollout) {
  const GameSpec g = scalar_integrator(2);
  const auto pol = constant_policy(1, {1}, 2, {scalar(0.5)}, {vec1(0)}, {scalar(1)});
  const Trajectory tr = simulate_mean(g, pol, vec1(1));
  EXPECT_DOUBLE_EQ(tr.states[1](0), 0.5);
  EXPECT_DOUBLE_EQ(tr.actions[0][0](0), -0.5);
}

TEST(SimulateMean, NominalOffsetsAreApplied) {
  const GameSpec g = scalar_integrator(2);
  auto pol = constant_policy(1, {1}, 2, {scalar(0.5)}, {vec1(0.1)}, {scalar(1)});
  pol.nominal_states[0] = vec1(2.0);
  pol.nominal_actions[0][0] = vec1(0.7);
  const Trajectory tr = simulate_mean(g, pol, vec1(1));
  // a = 0.7 - 0.5 (1 - 2) - 0.1
  EXPECT_DOUBLE_EQ(tr.actions[0][0](0), 1.1);
  EXPECT_DOUBLE_EQ(pol.global_offset(0, 0)(0), 0.1 - 0.7 - 0.5 * 2.0);
  EXPECT_DOUBLE_EQ(-0.5 * 1.0 - pol.global_offset(0, 0)(0), tr.actions[0][0](0));
}

TEST(SimulateMean, DivergenceNamesTimeStep) {
  GameSpec g = linear_game(scalar(1e200), {scalar(1)}, {scalar(1)}, {vec1(0)}, {{scalar(1)}}, 5,
                           vec1(1));
  const auto pol = AffineGaussianPolicySet::zeros(1, {1}, 5);
  try {
    simulate_mean(g, pol, vec1(1e200));
    FAIL() << "expected divergence";
  } catch (const DivergenceError& e) {
    EXPECT_EQ(e.time_step(), 2);
  }
}

TEST(SimulateMean, Bitwise) {
  GameSpec g = linear_game(Mat::Identity(2, 2) * 0.9, {Mat::Ones(2, 1)}, {Mat::Identity(2, 2)},
                           {Vec::Zero(2)}, {{scalar(1)}}, 6, Vec::Ones(2));
  const auto pol = constant_policy(2, {1}, 6, {Mat::Ones(1, 2) * 0.3}, {vec1(0.1)}, {scalar(1)});
  const Trajectory a = simulate_mean(g, pol, Vec::Ones(2));
  const Trajectory b = simulate_mean(g, pol, Vec::Ones(2));
  for (int k = 0; k < 6; ++k) EXPECT_TRUE((a.states[k].array() == b.states[k].array()).all());
}

TEST(SimulateStochastic, DegenerateCovarianceMatchesMean) {
  GameSpec g = linear_game(Mat::Identity(2, 2), {Mat::Ones(2, 1)}, {Mat::Identity(2, 2)},
                           {Vec::Zero(2)}, {{scalar(1)}}, 8, Vec::Ones(2));
  const auto pol = constant_policy(2, {1}, 8, {Mat::Ones(1, 2) * 0.2}, {vec1(0.05)},
                                   {scalar(1e-12)});
  const Trajectory mean = simulate_mean(g, pol, Vec::Ones(2));
  const Trajectory st = simulate_stochastic(g, pol, Vec::Ones(2), 3);
  for (int k = 0; k < 8; ++k) EXPECT_LT((mean.states[k] - st.states[k]).norm(), 1e-5);
}

TEST(SimulateStochastic, SameSeedSameTrajectory) {
  GameSpec g = scalar_integrator(10);
  g.noise = NoiseModel::identity(1);
  const auto pol = constant_policy(1, {1}, 10, {scalar(0.3)}, {vec1(0)}, {scalar(0.5)});
  const Trajectory a = simulate_stochastic(g, pol, vec1(1), 42);
  const Trajectory b = simulate_stochastic(g, pol, vec1(1), 42);
  const Trajectory c = simulate_stochastic(g, pol, vec1(1), 43);
  for (int k = 0; k < 10; ++k) {
    EXPECT_EQ(a.states[k](0), b.states[k](0));
    EXPECT_EQ(a.actions[k][0](0), b.actions[k][0](0));
  }
  EXPECT_NE(a.actions[0][0](0), c.actions[0][0](0));
}

TEST(SimulateStochastic, StandardNormalMoments) {
  const GameSpec g = scalar_integrator(1);
  const auto pol = AffineGaussianPolicySet::zeros(1, {1}, 1);
  PolicySampler sampler(g, pol);
  const int n = 100000;
  double sum = 0.0, sq = 0.0;
  Rng rng(2024);
  for (int j = 0; j < n; ++j) {
    const double a = sampler.rollout(vec1(0), rng).actions[0][0](0);
    sum += a;
    sq += a * a;
  }
  const double mean = sum / n;
  const double var = sq / n - mean * mean;
  EXPECT_LT(std::abs(mean), 0.02);
  EXPECT_GE(var, 0.97);
  EXPECT_LE(var, 1.03);
}

TEST(SimulateStochastic, RejectsIndefiniteCovariance) {
  const GameSpec g = scalar_integrator(2);
  const auto pol = constant_policy(1, {1}, 2, {scalar(0)}, {vec1(0)}, {scalar(-1)});
  EXPECT_THROW(simulate_stochastic(g, pol, vec1(0), 1), CovarianceError);
}

TEST(SimulateStochastic, BatchSeedsAreConsecutive) {
  GameSpec g = scalar_integrator(3);
  g.initial_state = InitialStateModel(vec1(0), scalar(1));
  const auto pol = AffineGaussianPolicySet::zeros(1, {1}, 3);
  PolicySampler sampler(g, pol);
  const auto batch = sampler.sample_batch(4, 10);
  ASSERT_EQ(batch.size(), 4u);
  for (int j = 0; j < 4; ++j) {
    EXPECT_EQ(batch[j].seed, 10u + j);
    const Trajectory again = sampler.sample(10 + j);
    EXPECT_EQ(again.states[2](0), batch[j].states[2](0));
  }
  EXPECT_NE(batch[0].states[0](0), batch[1].states[0](0));
}

TEST(EvaluateCost, ZeroTrajectoryQuadraticCostIsZero) {
  const GameSpec g = linear_game(Mat::Identity(2, 2), {Mat::Ones(2, 1), Mat::Ones(2, 1)},
                                 {Mat::Identity(2, 2), Mat::Identity(2, 2)},
                                 {Vec::Zero(2), Vec::Zero(2)},
                                 {{scalar(1), scalar(0)}, {scalar(0.5), scalar(2)}}, 3,
                                 Vec::Zero(2));
  const auto pol = AffineGaussianPolicySet::zeros(2, {1, 1}, 3);
  const Vec c = evaluate_cost(g, simulate_mean(g, pol, Vec::Zero(2)));
  EXPECT_EQ(c(0), 0.0);
  EXPECT_EQ(c(1), 0.0);
}

TEST(EvaluateCost, DirectSum) {
  // c = s^2 + a^2 with v = 1/2 s'Qs, Q = 2.
  const GameSpec g = linear_game(scalar(1), {scalar(1)}, {scalar(2)}, {vec1(0)}, {{scalar(1)}},
                                 2, vec1(1));
  Trajectory tr;
  tr.states = {vec1(1), vec1(1)};
  tr.actions = {{vec1(1)}, {vec1(0)}};
  EXPECT_DOUBLE_EQ(evaluate_cost(g, tr)(0), 3.0);
}

TEST(EvaluateCost, FeatureCostIsWeightedFeatureSum) {
  const int T = 5;
  FeatureBasis basis(T, {{{0, 1},
                          {FeatureDescriptor::tracking(Vec::Zero(2), Vec::Ones(2)),
                           FeatureDescriptor::effort(),
                           FeatureDescriptor::proximity(1, 0.7)}},
                         {{4, 5}, {FeatureDescriptor::effort()}}});
  const WeightVector w{Vec((Vec(3) << 1.3, 0.4, 2.5).finished()), vec1(0.8)};
  GameSpec g;
  g.horizon = T;
  g.dynamics = std::make_shared<PointMassDynamics>(2, 0.1);
  g.noise = NoiseModel::none(8);
  g.initial_state = InitialStateModel(Vec::Zero(8));
  g.costs = make_cost_models(basis, w, {2, 2});
  g.temperatures = {1.0, 1.0};
  Rng rng(5);
  Trajectory tr;
  for (int k = 0; k < T; ++k) {
    tr.states.push_back(standard_normal(8, rng));
    tr.actions.push_back({standard_normal(2, rng), standard_normal(2, rng)});
  }
  const Vec c = evaluate_cost(g, tr);
  const auto phi = eval_features(basis, tr);
  EXPECT_NEAR(c(0), w[0].dot(phi[0]), 1e-12);
  EXPECT_NEAR(c(1), w[1].dot(phi[1]), 1e-12);
}

TEST(GameSpecValidate, CatchesShapeProblems) {
  GameSpec g = scalar_integrator(2);
  EXPECT_NO_THROW(g.validate());
  g.temperatures = {};
  EXPECT_THROW(g.validate(), ShapeError);
  g = scalar_integrator(2);
  g.horizon = 0;
  EXPECT_THROW(g.validate(), ShapeError);
  g = scalar_integrator(2);
  g.costs[0] = std::make_shared<QuadraticCost>(scalar(1), vec1(0), std::vector<Mat>{scalar(-1)});
  EXPECT_THROW(g.validate(), CovarianceError);
}

TEST(NoiseModel, RejectsIndefiniteCovariance) {
  EXPECT_THROW(NoiseModel(Mat::Identity(2, 2), -Mat::Identity(2, 2)), CovarianceError);
  EXPECT_NO_THROW(NoiseModel(Mat::Identity(2, 2), Mat::Zero(2, 2)));
  EXPECT_TRUE(NoiseModel(Mat::Identity(2, 2), Mat::Zero(2, 2)).is_zero());
}

TEST(CheckBatch, NamesBadTrajectory) {
  TrajectoryBatch b(2);
  for (auto& tr : b) {
    tr.states = {vec1(0), vec1(1)};
    tr.actions = {{vec1(0)}, {vec1(0)}};
  }
  EXPECT_NO_THROW(check_batch(b, 1, {1}, 2));
  b[1].states[1](0) = std::numeric_limits<double>::infinity();
  EXPECT_THROW(check_batch(b, 1, {1}, 2), ShapeError);
}

}  // namespace
}  // namespace ece
