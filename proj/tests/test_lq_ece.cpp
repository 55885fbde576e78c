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

#include <random>
#include <vector>

#include "ece/lq_ece.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

namespace ece {
namespace {

using testing::scalar;
using testing::vec1;

LqStageGame scalar_game(int N, int T, double A = 1, double B = 1, double Q = 1, double R = 1) {
  std::vector<Mat> Bs(N, scalar(B)), Qs(N, scalar(Q));
  std::vector<Vec> ls(N, vec1(0));
  std::vector<std::vector<Mat>> Rs(N, std::vector<Mat>(N, scalar(0)));
  for (int i = 0; i < N; ++i) Rs[i][i] = scalar(R);
  return make_time_invariant_lq(scalar(A), Bs, Qs, ls, Rs, T);
}

TEST(SolveStageCoupled, ScalarSingleAgent) {
  const auto g = scalar_game(1, 2);
  const StageGains s = solve_stage_coupled(0, {scalar(1)}, {vec1(0)}, g);
  EXPECT_NEAR(s.P[0](0, 0), 0.5, 1e-15);
  EXPECT_EQ(s.alpha[0](0), 0.0);
  EXPECT_NEAR(s.block_inverse[0](0, 0), 0.5, 1e-15);
}

TEST(SolveStageCoupled, TwoAgentBlockSystem) {
  const auto g = scalar_game(2, 2);
  const StageGains s = solve_stage_coupled(0, {scalar(1), scalar(1)}, {vec1(0), vec1(0)}, g);
  EXPECT_NEAR(s.P[0](0, 0), 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(s.P[1](0, 0), 1.0 / 3.0, 1e-15);
}

TEST(SolveStageCoupled, ZeroRightHandSide) {
  const auto g = scalar_game(3, 2);
  const StageGains s =
      solve_stage_coupled(0, {scalar(0), scalar(0), scalar(0)}, {vec1(0), vec1(0), vec1(0)}, g);
  for (int i = 0; i < 3; ++i) {
    EXPECT_EQ(s.P[i](0, 0), 0.0);
    EXPECT_EQ(s.alpha[i](0), 0.0);
  }
  EXPECT_EQ(s.record.regularization, 0.0);
}

TEST(SolveStageCoupled, NearSingularIsRegularized) {
  const auto g = scalar_game(2, 2);
  const StageGains s =
      solve_stage_coupled(0, {scalar(-0.5), scalar(-0.5)}, {vec1(0), vec1(0)}, g);
  EXPECT_GT(s.record.regularization, 0.0);
  EXPECT_LE(s.record.condition, 1e12);
}

TEST(SolveStageCoupled, HopelesslyIllConditionedThrows) {
  const auto g = scalar_game(2, 2);
  try {
    solve_stage_coupled(0, {scalar(1e14), scalar(1e14)}, {vec1(0), vec1(0)}, g);
    FAIL() << "expected StageSingularError";
  } catch (const StageSingularError& e) {
    EXPECT_EQ(e.time_step(), 1);
  }
}

TEST(BackwardValueUpdate, ScalarHandRiccati) {
  const auto g = scalar_game(1, 2);
  const StageGains s = solve_stage_coupled(0, {scalar(1)}, {vec1(0)}, g);
  const ValueStage v = backward_value_update(0, s, {scalar(1)}, {vec1(0)}, g);
  EXPECT_NEAR(v.Z[0](0, 0), 1.5, 1e-15);
  EXPECT_EQ(v.xi[0](0), 0.0);
}

TEST(BackwardValueUpdate, ZeroCostAgentStaysZero) {
  auto g = scalar_game(2, 2);
  g.stages[0].Q[1] = scalar(0);
  StageGains s;
  s.P = {scalar(0.2), scalar(0)};
  s.alpha = {vec1(0), vec1(0)};
  // Agent 2: Q = 0, l = 0, R^{21} = 0, P^2 = 0, Z_next = 0.
  const ValueStage v = backward_value_update(0, s, {scalar(1), scalar(0)}, {vec1(0), vec1(0)}, g);
  EXPECT_EQ(v.Z[1](0, 0), 0.0);
  EXPECT_EQ(v.xi[1](0), 0.0);
}

TEST(BackwardValueUpdate, UncontrolledLyapunovStep) {
  std::mt19937_64 rng(3);
  const Mat A = oracle::random_mat(3, 3, rng);
  const Mat Q = oracle::random_spd(3, rng, 0.1);
  const Mat Zn = oracle::random_spd(3, rng, 0.1);
  const auto g = make_time_invariant_lq(A, {Mat::Ones(3, 1)}, {Q}, {Vec::Zero(3)}, {{scalar(1)}}, 2);
  StageGains s;
  s.P = {Mat::Zero(1, 3)};
  s.alpha = {Vec::Zero(1)};
  const ValueStage v = backward_value_update(0, s, {Zn}, {Vec::Zero(3)}, g);
  const Mat expect = A.transpose() * Zn * A + Q;
  EXPECT_LT((v.Z[0] - 0.5 * (expect + expect.transpose())).norm(), 1e-12);
}

TEST(SolveLqEce, SingleStageTerminalPolicy) {
  const auto g = scalar_game(1, 1, 3.0, 2.0);
  const std::vector<double> temps{1.0};
  const LqSolution sol = solve_lq_ece(g, temps);
  EXPECT_EQ(sol.policies.mean_action(0, 0, vec1(5))(0), 0.0);
  EXPECT_DOUBLE_EQ(sol.policies.stages[0][0].covariance(0, 0), 1.0);
  EXPECT_DOUBLE_EQ(sol.values.Z[0][0](0, 0), 1.0);
}

TEST(SolveLqEce, ScalarTwoStage) {
  const auto g = scalar_game(1, 2);
  const std::vector<double> temps{1.0};
  const LqSolution sol = solve_lq_ece(g, temps);
  EXPECT_NEAR(sol.policies.stages[0][0].gain(0, 0), 0.5, 1e-15);
  EXPECT_EQ(sol.policies.stages[0][0].offset(0), 0.0);
  EXPECT_NEAR(sol.policies.stages[0][0].covariance(0, 0), 0.5, 1e-15);
  EXPECT_NEAR(sol.policies.stages[1][0].covariance(0, 0), 1.0, 1e-15);
  EXPECT_NEAR(sol.values.Z[0][0](0, 0), 1.5, 1e-15);
  ASSERT_EQ(sol.report.stages.size(), 1u);
  EXPECT_EQ(sol.report.stages[0].t, 1);
  EXPECT_FALSE(sol.report.regularized());
}

TEST(SolveLqEce, PermutationSymmetricAgents) {
  // State (x1, x2); agent i pushes x_i and cares about its own coordinate.
  const Mat A = (Mat(2, 2) << 1.0, 0.2, 0.2, 1.0).finished();
  const Mat B1 = (Mat(2, 1) << 1.0, 0.3).finished();
  const Mat B2 = (Mat(2, 1) << 0.3, 1.0).finished();
  const Mat Q1 = (Mat(2, 2) << 2.0, 0.5, 0.5, 1.0).finished();
  const Mat Pm = (Mat(2, 2) << 0, 1, 1, 0).finished();
  const Mat Q2 = Pm * Q1 * Pm;
  const Vec l1 = (Vec(2) << 0.3, -0.1).finished();
  const Vec l2 = Pm * l1;
  const std::vector<std::vector<Mat>> R{{scalar(1), scalar(0.2)}, {scalar(0.2), scalar(1)}};
  const auto g = make_time_invariant_lq(A, {B1, B2}, {Q1, Q2}, {l1, l2}, R, 6);
  const std::vector<double> temps{0.7, 0.7};
  const LqSolution sol = solve_lq_ece(g, temps);
  for (int k = 0; k < 6; ++k) {
    const auto& p1 = sol.policies.stages[k][0];
    const auto& p2 = sol.policies.stages[k][1];
    EXPECT_LT((p1.gain - p2.gain * Pm).norm(), 1e-12);
    EXPECT_NEAR(p1.offset(0), p2.offset(0), 1e-12);
    EXPECT_NEAR(p1.covariance(0, 0), p2.covariance(0, 0), 1e-12);
  }
}

TEST(SolveLqEce, TemperatureScalesOnlyCovariance) {
  std::mt19937_64 rng(11);
  const auto d = oracle::random_lq(2, 3, {2, 1}, 7, rng, true, true);
  const auto g = make_time_invariant_lq(d.A, d.B, d.Q, d.l, d.R, d.T);
  const std::vector<double> t1{1.0, 1.0}, t2{3.0, 0.25};
  const LqSolution a = solve_lq_ece(g, t1);
  const LqSolution b = solve_lq_ece(g, t2);
  for (int k = 0; k < d.T; ++k) {
    for (int i = 0; i < 2; ++i) {
      const auto& x = a.policies.stages[k][i];
      const auto& y = b.policies.stages[k][i];
      EXPECT_TRUE((x.gain.array() == y.gain.array()).all());
      EXPECT_TRUE((x.offset.array() == y.offset.array()).all());
      EXPECT_LT((y.covariance - t2[i] * x.covariance).norm(), 1e-12 * (1 + x.covariance.norm()));
    }
  }
}

TEST(SolveLqEce, ScalarCovarianceBoundedByInverseR) {
  const auto g = scalar_game(1, 10, 1.1, 0.8, 2.0, 1.5);
  const std::vector<double> temps{1.0};
  const LqSolution sol = solve_lq_ece(g, temps);
  for (int k = 0; k + 1 < 10; ++k) EXPECT_LE(sol.policies.stages[k][0].covariance(0, 0), 1.0 / 1.5);
}

TEST(SolveLqEce, ValueMatricesStaySymmetric) {
  std::mt19937_64 rng(12);
  const auto d = oracle::random_lq(3, 4, {1, 2, 1}, 15, rng, true, true);
  const auto g = make_time_invariant_lq(d.A, d.B, d.Q, d.l, d.R, d.T);
  const std::vector<double> temps{1.0, 1.0, 1.0};
  const LqSolution sol = solve_lq_ece(g, temps);
  for (const auto& stage : sol.values.Z)
    for (const auto& Z : stage) EXPECT_LT((Z - Z.transpose()).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(SolveLqEce, TerminalConditions) {
  std::mt19937_64 rng(13);
  const auto d = oracle::random_lq(2, 3, {1, 1}, 5, rng, true, false);
  const auto g = make_time_invariant_lq(d.A, d.B, d.Q, d.l, d.R, d.T);
  const std::vector<double> temps{2.0, 0.5};
  const LqSolution sol = solve_lq_ece(g, temps);
  for (int i = 0; i < 2; ++i) {
    EXPECT_LT((sol.values.Z[4][i] - d.Q[i]).norm(), 1e-14);
    EXPECT_LT((sol.values.xi[4][i] - d.l[i]).norm(), 1e-14);
    EXPECT_TRUE(sol.policies.stages[4][i].gain.isZero(0.0));
    EXPECT_NEAR(sol.policies.stages[4][i].covariance(0, 0), temps[i] / d.R[i][i](0, 0), 1e-14);
  }
}

TEST(SolveLqEce, StrictModeDropsStageLinearTerm) {
  auto g = scalar_game(1, 3);
  for (auto& st : g.stages) st.l[0] = vec1(0.5);
  const std::vector<double> temps{1.0};
  const LqSolution ext = solve_lq_ece(g, temps);
  const LqSolution strict = solve_lq_ece(g, temps, LqOptions{.strict_paper = true});
  // Terminal xi is l in both; the intermediate one differs by l.
  EXPECT_EQ(ext.values.xi[2][0](0), strict.values.xi[2][0](0));
  EXPECT_NEAR(ext.values.xi[1][0](0) - strict.values.xi[1][0](0), 0.5, 1e-15);
  EXPECT_EQ(ext.policies.stages[1][0].gain(0, 0), strict.policies.stages[1][0].gain(0, 0));
}

TEST(SolveLqEce, LinearActionTermShiftsOffset) {
  auto g = scalar_game(1, 2, 1, 1, 1, 2);
  for (auto& st : g.stages) st.r = {{vec1(0.4)}};
  const std::vector<double> temps{1.0};
  const LqSolution sol = solve_lq_ece(g, temps);
  // Terminal: minimise 1/2 R a^2 + r a -> a = -r / R.
  EXPECT_NEAR(sol.policies.mean_action(1, 0, vec1(0))(0), -0.2, 1e-15);
  const LqSolution strict = solve_lq_ece(g, temps, LqOptions{.strict_paper = true});
  EXPECT_EQ(strict.policies.mean_action(1, 0, vec1(0))(0), 0.0);
}

TEST(SolveLqEce, RejectsBadInputs) {
  auto g = scalar_game(2, 3);
  const std::vector<double> one{1.0};
  EXPECT_THROW(solve_lq_ece(g, one), ShapeError);
  g.R[0][0] = scalar(-1);
  const std::vector<double> two{1.0, 1.0};
  EXPECT_THROW(solve_lq_ece(g, two), CovarianceError);
}

TEST(SolveLqEce, MatchesLqrOracleOnRandomGames) {
  std::mt19937_64 rng(21);
  for (int rep = 0; rep < 10; ++rep) {
    const auto d = oracle::random_lq(1, 3, {2}, 12, rng, false, false);
    const auto g = make_time_invariant_lq(d.A, d.B, d.Q, d.l, d.R, d.T);
    const std::vector<double> temps{1.0};
    const LqSolution sol = solve_lq_ece(g, temps);
    const auto lqr = oracle::textbook_lqr(d.A, d.B[0], d.Q[0], d.R[0][0], d.T);
    for (int k = 0; k + 1 < d.T; ++k) {
      EXPECT_LT((sol.policies.stages[k][0].gain - lqr.K[k]).cwiseAbs().maxCoeff(), 1e-9);
      EXPECT_LT((sol.policies.stages[k][0].covariance - lqr.S[k]).cwiseAbs().maxCoeff(), 1e-9);
    }
  }
}

TEST(SolveLqEce, MatchesFeedbackNashOracle) {
  std::mt19937_64 rng(22);
  for (int rep = 0; rep < 10; ++rep) {
    const auto d = oracle::random_lq(3, 4, {1, 2, 1}, 10, rng, true, true);
    const auto g = make_time_invariant_lq(d.A, d.B, d.Q, d.l, d.R, d.T);
    const std::vector<double> temps{1.0, 1.0, 1.0};
    const LqSolution sol = solve_lq_ece(g, temps);
    const auto nash = oracle::feedback_nash(d.A, d.B, d.Q, d.l, d.R, d.T);
    for (int k = 0; k + 1 < d.T; ++k) {
      for (int i = 0; i < 3; ++i) {
        EXPECT_LT((sol.policies.stages[k][i].gain - nash.P[k][i]).cwiseAbs().maxCoeff(), 1e-8);
        EXPECT_LT((sol.policies.stages[k][i].offset - nash.alpha[k][i]).cwiseAbs().maxCoeff(),
                  1e-8);
      }
    }
  }
}

}  // namespace
}  // namespace ece
