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

// Exact entropic cost equilibrium of linear-quadratic-Gaussian games.
//
// Stage cost of agent i at time t, in the Taylor convention used throughout
// this header:
//
//   1/2 s'Q_t^i s + l_t^i's + sum_j (1/2 a^j'R^{ij}a^j + r_t^{ij}'a^j)
//
// Each agent's policy is Gaussian, N(-P_t^i s - alpha_t^i, Sigma_t^i). Means
// follow the coupled feedback-Nash recursion; covariances are the inverse
// action Hessians of the expected Q function, scaled by the temperature.

#ifndef ECE_LQ_ECE_HPP_
#define ECE_LQ_ECE_HPP_

#include <span>
#include <vector>

#include "ece/game.hpp"

namespace ece {

struct LqStage {
  Mat A;                              // unused at t = T
  std::vector<Mat> B;                 // unused at t = T
  std::vector<Mat> Q;                 // per agent
  std::vector<Vec> l;                 // per agent
  std::vector<std::vector<Vec>> r;    // r[i][j]; empty means zero
};

struct LqStageGame {
  int state_dim = 0;
  std::vector<int> action_dims;
  std::vector<std::vector<Mat>> R;  // R[i][j], constant over time
  std::vector<LqStage> stages;      // t = 1..T

  int horizon() const { return static_cast<int>(stages.size()); }
  int num_agents() const { return static_cast<int>(action_dims.size()); }

  // Linear action term r_t^{ij}, zero when not stored.
  Vec linear_action_term(int k, int i, int j) const;

  void validate() const;
};

// Same A, B, Q, l at every step; r = 0.
LqStageGame make_time_invariant_lq(const Mat& A, const std::vector<Mat>& B,
                                   const std::vector<Mat>& Q,
                                   const std::vector<Vec>& l,
                                   const std::vector<std::vector<Mat>>& R,
                                   int horizon);

struct ValueRecursion {
  std::vector<std::vector<Mat>> Z;   // [k][i]
  std::vector<std::vector<Vec>> xi;  // [k][i]
};

struct StageSolveRecord {
  int t = 0;
  double condition = 0.0;       // 1 / rcond of the coupled block matrix
  double regularization = 0.0;  // lambda added to its diagonal, 0 if none
};

struct StageSolveReport {
  std::vector<StageSolveRecord> stages;  // t = T-1 down to 1

  bool regularized() const {
    for (const auto& s : stages) {
      if (s.regularization > 0.0) return true;
    }
    return false;
  }
};

struct LqOptions {
  // Drops l_t^i from the xi update and ignores every linear action term.
  bool strict_paper = false;
  double max_condition = 1e12;
  double initial_regularization = 1e-8;
  double max_regularization = 1e-2;
};

struct StageGains {
  std::vector<Mat> P;
  std::vector<Vec> alpha;
  // Inverse of each (possibly regularized) diagonal block R^{ii} + B^i'Z^iB^i.
  std::vector<Mat> block_inverse;
  StageSolveRecord record;
};

// Solves the coupled linear systems for all agents' P_t and alpha_t at one
// stage with a single factorization. `k` is the 0-based stage index.
StageGains solve_stage_coupled(int k, const std::vector<Mat>& Z_next,
                               const std::vector<Vec>& xi_next,
                               const LqStageGame& game,
                               const LqOptions& options = {});

struct ValueStage {
  std::vector<Mat> Z;
  std::vector<Vec> xi;
};

// Z_t, xi_t from the gains at stage k and the values at k + 1.
ValueStage backward_value_update(int k, const StageGains& gains,
                                 const std::vector<Mat>& Z_next,
                                 const std::vector<Vec>& xi_next,
                                 const LqStageGame& game,
                                 const LqOptions& options = {});

struct LqSolution {
  AffineGaussianPolicySet policies;  // zero nominal
  ValueRecursion values;
  StageSolveReport report;
};

LqSolution solve_lq_ece(const LqStageGame& game,
                        std::span<const double> temperatures,
                        const LqOptions& options = {});

}  // namespace ece

#endif  // ECE_LQ_ECE_HPP_
