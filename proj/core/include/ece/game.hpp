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

// Core game model: dynamics, noise, costs, policies and rollouts.
//
// Time is 1-based at every evaluator boundary (t = 1..T). Containers are
// 0-based, so element k of a trajectory or policy set belongs to t = k + 1.
// A trajectory holds s_1..s_T and a_1..a_T; the action at T is costed but
// does not move the state.

#ifndef ECE_GAME_HPP_
#define ECE_GAME_HPP_

#include <cstdint>
#include <memory>
#include <vector>

#include "ece/types.hpp"

namespace ece {

// Jacobians of the step map at one (t, s, a): A = D_s f, B[j] = D_{a^j} f.
struct LinearStage {
  Mat A;
  std::vector<Mat> B;
};

// Mean drift f of s_{t+1} = f(t, s_t, a_t) + G w_t.
class DynamicsModel {
 public:
  virtual ~DynamicsModel() = default;

  virtual int state_dim() const = 0;
  virtual std::vector<int> action_dims() const = 0;

  virtual Vec step(int t, const Vec& state, const JointAction& actions) const = 0;
  virtual LinearStage linearize(int t, const Vec& state,
                                const JointAction& actions) const = 0;

  int num_agents() const { return static_cast<int>(action_dims().size()); }
};

// Additive Gaussian process noise G w, w ~ N(0, W). G is constant.
class NoiseModel {
 public:
  NoiseModel() = default;
  NoiseModel(Mat gain, Mat covariance);

  static NoiseModel identity(int state_dim);
  static NoiseModel none(int state_dim);

  const Mat& gain() const { return gain_; }
  const Mat& covariance() const { return covariance_; }
  int state_dim() const { return static_cast<int>(gain_.rows()); }
  bool is_zero() const { return zero_; }

  // One draw of G w.
  Vec sample(Rng& rng) const;

 private:
  Mat gain_;
  Mat covariance_;
  Mat factor_;  // G * W^{1/2}
  bool zero_ = true;
};

// p_1: a fixed state when the covariance is zero, Gaussian otherwise.
class InitialStateModel {
 public:
  InitialStateModel() = default;
  explicit InitialStateModel(Vec mean);
  InitialStateModel(Vec mean, Mat covariance);

  const Vec& mean() const { return mean_; }
  const Mat& covariance() const { return covariance_; }
  bool is_fixed() const { return fixed_; }

  Vec sample(Rng& rng) const;

 private:
  Vec mean_;
  Mat covariance_;
  Mat factor_;
  bool fixed_ = true;
};

// Separable stage cost c^i(t, s, a) = v^i(t, s) + sum_j a^j' R^{ij} a^j.
class CostModel {
 public:
  virtual ~CostModel() = default;

  virtual double state_cost(int t, const Vec& state) const = 0;
  virtual Vec state_gradient(int t, const Vec& state) const = 0;
  virtual Mat state_hessian(int t, const Vec& state) const = 0;

  // R^{ij} for j = 0..N-1.
  virtual const std::vector<Mat>& action_weights() const = 0;

  double stage_cost(int t, const Vec& state, const JointAction& actions) const;
};

// v(s) = 1/2 s'Qs + l's with constant Q, l, plus the action terms.
class QuadraticCost final : public CostModel {
 public:
  QuadraticCost(Mat Q, Vec l, std::vector<Mat> R);

  double state_cost(int t, const Vec& state) const override;
  Vec state_gradient(int t, const Vec& state) const override;
  Mat state_hessian(int t, const Vec& state) const override;
  const std::vector<Mat>& action_weights() const override { return R_; }

 private:
  Mat Q_;
  Vec l_;
  std::vector<Mat> R_;
};

struct GameSpec {
  int horizon = 1;
  std::shared_ptr<const DynamicsModel> dynamics;
  NoiseModel noise;
  InitialStateModel initial_state;
  std::vector<std::shared_ptr<const CostModel>> costs;
  std::vector<double> temperatures;

  int num_agents() const { return dynamics->num_agents(); }
  int state_dim() const { return dynamics->state_dim(); }
  std::vector<int> action_dims() const { return dynamics->action_dims(); }

  // Throws ShapeError / CovarianceError when the invariants do not hold.
  void validate() const;
};

struct Trajectory {
  std::vector<Vec> states;           // s_1..s_T
  std::vector<JointAction> actions;  // a_1..a_T
  std::uint64_t seed = 0;

  int horizon() const { return static_cast<int>(states.size()); }
};

using TrajectoryBatch = std::vector<Trajectory>;

// Checks shared dimensions and finiteness; throws ShapeError naming the
// offending trajectory.
void check_batch(const TrajectoryBatch& batch, int state_dim,
                 const std::vector<int>& action_dims, int horizon);

// pi_t^i = N(abar_t^i - P_t^i (s - sbar_t) - alpha_t^i, Sigma_t^i).
struct PolicyStage {
  Mat gain;        // P_t^i
  Vec offset;      // alpha_t^i
  Mat covariance;  // Sigma_t^i
};

struct AffineGaussianPolicySet {
  std::vector<Vec> nominal_states;                // T
  std::vector<JointAction> nominal_actions;       // T x N
  std::vector<std::vector<PolicyStage>> stages;   // T x N

  // Zero gains and offsets around a zero nominal, identity covariances.
  static AffineGaussianPolicySet zeros(int state_dim,
                                       const std::vector<int>& action_dims,
                                       int horizon);

  int horizon() const { return static_cast<int>(stages.size()); }
  int num_agents() const {
    return stages.empty() ? 0 : static_cast<int>(stages.front().size());
  }

  // Mean action of agent `agent` at time index `k` (t = k + 1).
  Vec mean_action(int k, int agent, const Vec& state) const;

  // Offset in the global form a = -P s - alpha_global. Equal to alpha when
  // the nominal is zero.
  Vec global_offset(int k, int agent) const;

  void validate(int state_dim, const std::vector<int>& action_dims) const;
};

Trajectory simulate_mean(const GameSpec& game,
                         const AffineGaussianPolicySet& policies,
                         const Vec& initial_state);

Trajectory simulate_stochastic(const GameSpec& game,
                               const AffineGaussianPolicySet& policies,
                               const Vec& initial_state, std::uint64_t seed);

// Reuses Cholesky factors of every policy covariance across many rollouts.
class PolicySampler {
 public:
  PolicySampler(const GameSpec& game, const AffineGaussianPolicySet& policies);

  Trajectory rollout(const Vec& initial_state, Rng& rng) const;

  // Draws s_1 from the game's p_1, then rolls out with the same engine.
  Trajectory sample(std::uint64_t seed) const;

  // seeds base_seed, base_seed + 1, ...
  TrajectoryBatch sample_batch(int count, std::uint64_t base_seed) const;

 private:
  const GameSpec& game_;
  const AffineGaussianPolicySet& policies_;
  std::vector<std::vector<Mat>> factors_;  // T x N
};

// Raw cumulative stage cost per agent (no entropy term).
Vec evaluate_cost(const GameSpec& game, const Trajectory& trajectory);

// Standard normal vector of length `dim`.
Vec standard_normal(int dim, Rng& rng);

}  // namespace ece

#endif  // ECE_GAME_HPP_
