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

#include "ece/lq_ece.hpp"

#include <numeric>
#include <string>

namespace ece {
namespace {

std::vector<int> offsets_of(const std::vector<int>& dims) {
  std::vector<int> offsets(dims.size() + 1, 0);
  std::partial_sum(dims.begin(), dims.end(), offsets.begin() + 1);
  return offsets;
}

Mat symmetrized(const Mat& m) { return 0.5 * (m + m.transpose()); }

}  // namespace

Vec LqStageGame::linear_action_term(int k, int i, int j) const {
  const auto& r = stages[k].r;
  if (r.size() > static_cast<std::size_t>(i) && r[i].size() > static_cast<std::size_t>(j) &&
      r[i][j].size() > 0) {
    return r[i][j];
  }
  return Vec::Zero(action_dims[j]);
}

void LqStageGame::validate() const {
  const int N = num_agents();
  const int n = state_dim;
  if (N < 1) throw ShapeError("LQ game needs at least one agent");
  if (stages.empty()) throw ShapeError("LQ game horizon must be >= 1");
  if (static_cast<int>(R.size()) != N) throw ShapeError("R must be N x N blocks");
  for (int i = 0; i < N; ++i) {
    if (static_cast<int>(R[i].size()) != N) throw ShapeError("R must be N x N blocks");
    for (int j = 0; j < N; ++j) {
      if (R[i][j].rows() != action_dims[j] || R[i][j].cols() != action_dims[j]) {
        throw ShapeError("R^{ij} must be m^j x m^j");
      }
    }
    Eigen::LLT<Mat> llt(symmetrized(R[i][i]));
    if (llt.info() != Eigen::Success) {
      throw CovarianceError("R^{ii} of agent " + std::to_string(i) +
                                " is not positive definite",
                            i, -1);
    }
  }
  const int T = horizon();
  for (int k = 0; k < T; ++k) {
    const auto& st = stages[k];
    const std::string at = " at t=" + std::to_string(k + 1);
    if (k + 1 < T) {
      if (st.A.rows() != n || st.A.cols() != n) throw ShapeError("A must be n x n" + at);
      if (static_cast<int>(st.B.size()) != N) throw ShapeError("one B^j per agent" + at);
      for (int j = 0; j < N; ++j) {
        if (st.B[j].rows() != n || st.B[j].cols() != action_dims[j]) {
          throw ShapeError("B^j must be n x m^j" + at);
        }
      }
    }
    if (static_cast<int>(st.Q.size()) != N || static_cast<int>(st.l.size()) != N) {
      throw ShapeError("one Q and l per agent" + at);
    }
    for (int i = 0; i < N; ++i) {
      if (st.Q[i].rows() != n || st.Q[i].cols() != n || st.l[i].size() != n) {
        throw ShapeError("Q^i must be n x n and l^i of length n" + at);
      }
    }
  }
}

LqStageGame make_time_invariant_lq(const Mat& A, const std::vector<Mat>& B,
                                   const std::vector<Mat>& Q,
                                   const std::vector<Vec>& l,
                                   const std::vector<std::vector<Mat>>& R,
                                   int horizon) {
  LqStageGame game;
  game.state_dim = static_cast<int>(A.rows());
  for (const auto& b : B) game.action_dims.push_back(static_cast<int>(b.cols()));
  game.R = R;
  game.stages.assign(horizon, LqStage{A, B, Q, l, {}});
  return game;
}

StageGains solve_stage_coupled(int k, const std::vector<Mat>& Z_next,
                               const std::vector<Vec>& xi_next,
                               const LqStageGame& game,
                               const LqOptions& options) {
  const int N = game.num_agents();
  const int n = game.state_dim;
  const auto offsets = offsets_of(game.action_dims);
  const int total = offsets.back();
  const LqStage& stage = game.stages[k];

  // Stacked system M [P; alpha] = [Y_P, Y_alpha].
  Mat M(total, total);
  Mat rhs(total, n + 1);
  for (int i = 0; i < N; ++i) {
    const int mi = game.action_dims[i];
    const Mat BiZ = stage.B[i].transpose() * Z_next[i];
    for (int j = 0; j < N; ++j) {
      M.block(offsets[i], offsets[j], mi, game.action_dims[j]) = BiZ * stage.B[j];
    }
    M.block(offsets[i], offsets[i], mi, mi) += game.R[i][i];
    rhs.block(offsets[i], 0, mi, n) = BiZ * stage.A;
    Vec rhs_alpha = stage.B[i].transpose() * xi_next[i];
    if (!options.strict_paper) rhs_alpha += game.linear_action_term(k, i, i);
    rhs.block(offsets[i], n, mi, 1) = rhs_alpha;
  }

  StageGains gains;
  gains.record.t = k + 1;
  Eigen::PartialPivLU<Mat> lu(M);
  double condition = 1.0 / lu.rcond();
  double lambda = 0.0;
  if (!(condition <= options.max_condition)) {
    lambda = options.initial_regularization;
    for (;;) {
      lu.compute(M + lambda * Mat::Identity(total, total));
      condition = 1.0 / lu.rcond();
      if (condition <= options.max_condition) break;
      lambda *= 2.0;
      if (lambda > options.max_regularization) {
        throw StageSingularError(
            "coupled stage system is singular at t=" + std::to_string(k + 1), k + 1);
      }
    }
  }
  gains.record.condition = condition;
  gains.record.regularization = lambda;

  const Mat X = lu.solve(rhs);
  if (!X.allFinite()) {
    throw StageSingularError("non-finite stage gains at t=" + std::to_string(k + 1), k + 1);
  }
  for (int i = 0; i < N; ++i) {
    const int mi = game.action_dims[i];
    gains.P.push_back(X.block(offsets[i], 0, mi, n));
    gains.alpha.push_back(X.block(offsets[i], n, mi, 1));

    Mat block = M.block(offsets[i], offsets[i], mi, mi);
    block.diagonal().array() += lambda;
    Eigen::LLT<Mat> llt(symmetrized(block));
    if (llt.info() != Eigen::Success) {
      throw CovarianceError("R^{ii} + B^i'Z^iB^i is not positive definite for agent " +
                                std::to_string(i) + " at t=" + std::to_string(k + 1),
                            i, k + 1);
    }
    gains.block_inverse.push_back(llt.solve(Mat::Identity(mi, mi)));
  }
  return gains;
}

ValueStage backward_value_update(int k, const StageGains& gains,
                                 const std::vector<Mat>& Z_next,
                                 const std::vector<Vec>& xi_next,
                                 const LqStageGame& game,
                                 const LqOptions& options) {
  const int N = game.num_agents();
  const LqStage& stage = game.stages[k];

  Mat F = stage.A;
  Vec beta = Vec::Zero(game.state_dim);
  for (int j = 0; j < N; ++j) {
    F.noalias() -= stage.B[j] * gains.P[j];
    beta.noalias() -= stage.B[j] * gains.alpha[j];
  }

  ValueStage out;
  out.Z.reserve(N);
  out.xi.reserve(N);
  for (int i = 0; i < N; ++i) {
    Mat Z = F.transpose() * Z_next[i] * F + stage.Q[i];
    Vec xi = F.transpose() * (xi_next[i] + Z_next[i] * beta);
    if (!options.strict_paper) xi += stage.l[i];
    for (int j = 0; j < N; ++j) {
      const Mat PtR = gains.P[j].transpose() * game.R[i][j];
      Z.noalias() += PtR * gains.P[j];
      xi.noalias() += PtR * gains.alpha[j];
      if (!options.strict_paper) {
        xi.noalias() -= gains.P[j].transpose() * game.linear_action_term(k, i, j);
      }
    }
    out.Z.push_back(symmetrized(Z));
    out.xi.push_back(std::move(xi));
  }
  return out;
}

LqSolution solve_lq_ece(const LqStageGame& game,
                        std::span<const double> temperatures,
                        const LqOptions& options) {
  game.validate();
  const int N = game.num_agents();
  const int n = game.state_dim;
  const int T = game.horizon();
  if (static_cast<int>(temperatures.size()) != N) {
    throw ShapeError("one temperature per agent required");
  }

  LqSolution sol;
  sol.policies = AffineGaussianPolicySet::zeros(n, game.action_dims, T);
  sol.values.Z.resize(T);
  sol.values.xi.resize(T);

  // Terminal stage: Z_T = Q_T, xi_T = l_T; the policy minimizes the action
  // cost alone.
  const LqStage& last = game.stages[T - 1];
  for (int i = 0; i < N; ++i) {
    sol.values.Z[T - 1].push_back(symmetrized(last.Q[i]));
    sol.values.xi[T - 1].push_back(last.l[i]);
    const int mi = game.action_dims[i];
    Eigen::LLT<Mat> llt(symmetrized(game.R[i][i]));
    const Mat R_inv = llt.solve(Mat::Identity(mi, mi));
    auto& st = sol.policies.stages[T - 1][i];
    st.gain.setZero();
    st.offset = options.strict_paper ? Vec(Vec::Zero(mi))
                                     : Vec(R_inv * game.linear_action_term(T - 1, i, i));
    st.covariance = temperatures[i] * symmetrized(R_inv);
  }

  for (int k = T - 2; k >= 0; --k) {
    const StageGains gains = solve_stage_coupled(k, sol.values.Z[k + 1],
                                                 sol.values.xi[k + 1], game, options);
    ValueStage values = backward_value_update(k, gains, sol.values.Z[k + 1],
                                              sol.values.xi[k + 1], game, options);
    for (int i = 0; i < N; ++i) {
      auto& st = sol.policies.stages[k][i];
      st.gain = gains.P[i];
      st.offset = gains.alpha[i];
      st.covariance = temperatures[i] * symmetrized(gains.block_inverse[i]);
      Eigen::LLT<Mat> check(st.covariance);
      if (check.info() != Eigen::Success || !st.covariance.allFinite()) {
        throw CovarianceError("policy covariance of agent " + std::to_string(i) +
                                  " at t=" + std::to_string(k + 1) +
                                  " is not positive definite",
                              i, k + 1);
      }
    }
    sol.values.Z[k] = std::move(values.Z);
    sol.values.xi[k] = std::move(values.xi);
    sol.report.stages.push_back(gains.record);
  }
  return sol;
}

}  // namespace ece
