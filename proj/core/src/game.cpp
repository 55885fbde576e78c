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

#include "ece/game.hpp"

#include <cmath>
#include <string>

namespace ece {
namespace {

// Symmetric square root of a PSD matrix. Throws CovarianceError when a
// clearly negative eigenvalue shows up.
Mat psd_sqrt(const Mat& m, const char* what) {
  if (m.rows() != m.cols()) throw ShapeError(std::string(what) + " is not square");
  if (m.size() == 0) return m;
  if (!m.allFinite()) throw CovarianceError(std::string(what) + " is not finite", -1, -1);
  const double asym = (m - m.transpose()).cwiseAbs().maxCoeff();
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if (asym > 1e-9 * scale) {
    throw CovarianceError(std::string(what) + " is not symmetric", -1, -1);
  }
  Eigen::SelfAdjointEigenSolver<Mat> eig(0.5 * (m + m.transpose()));
  Vec values = eig.eigenvalues();
  if (values.minCoeff() < -1e-10 * scale) {
    throw CovarianceError(std::string(what) + " is not positive semi-definite", -1, -1);
  }
  values = values.cwiseMax(0.0).cwiseSqrt();
  return eig.eigenvectors() * values.asDiagonal() * eig.eigenvectors().transpose();
}

void check_state(const Vec& s, int t) {
  if (!s.allFinite()) {
    throw DivergenceError("non-finite state at t=" + std::to_string(t), t);
  }
}

}  // namespace

Vec standard_normal(int dim, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Vec z(dim);
  for (int k = 0; k < dim; ++k) z(k) = normal(rng);
  return z;
}

// ---------------------------------------------------------------------------
// NoiseModel / InitialStateModel

NoiseModel::NoiseModel(Mat gain, Mat covariance)
    : gain_(std::move(gain)), covariance_(std::move(covariance)) {
  if (gain_.cols() != covariance_.rows()) {
    throw ShapeError("noise gain columns must match noise covariance size");
  }
  factor_ = gain_ * psd_sqrt(covariance_, "noise covariance");
  zero_ = factor_.size() == 0 || factor_.cwiseAbs().maxCoeff() == 0.0;
}

NoiseModel NoiseModel::identity(int state_dim) {
  return NoiseModel(Mat::Identity(state_dim, state_dim),
                    Mat::Identity(state_dim, state_dim));
}

NoiseModel NoiseModel::none(int state_dim) {
  return NoiseModel(Mat::Identity(state_dim, state_dim),
                    Mat::Zero(state_dim, state_dim));
}

Vec NoiseModel::sample(Rng& rng) const {
  return factor_ * standard_normal(static_cast<int>(factor_.cols()), rng);
}

InitialStateModel::InitialStateModel(Vec mean)
    : mean_(std::move(mean)),
      covariance_(Mat::Zero(mean_.size(), mean_.size())) {}

InitialStateModel::InitialStateModel(Vec mean, Mat covariance)
    : mean_(std::move(mean)), covariance_(std::move(covariance)) {
  if (covariance_.rows() != mean_.size()) {
    throw ShapeError("initial-state covariance does not match mean");
  }
  factor_ = psd_sqrt(covariance_, "initial-state covariance");
  fixed_ = factor_.size() == 0 || factor_.cwiseAbs().maxCoeff() == 0.0;
}

Vec InitialStateModel::sample(Rng& rng) const {
  if (fixed_) return mean_;
  return mean_ + factor_ * standard_normal(static_cast<int>(mean_.size()), rng);
}

// ---------------------------------------------------------------------------
// Costs

double CostModel::stage_cost(int t, const Vec& state,
                             const JointAction& actions) const {
  double cost = state_cost(t, state);
  const auto& R = action_weights();
  for (std::size_t j = 0; j < actions.size(); ++j) {
    cost += actions[j].dot(R[j] * actions[j]);
  }
  return cost;
}

QuadraticCost::QuadraticCost(Mat Q, Vec l, std::vector<Mat> R)
    : Q_(std::move(Q)), l_(std::move(l)), R_(std::move(R)) {
  if (Q_.rows() != Q_.cols() || l_.size() != Q_.rows()) {
    throw ShapeError("quadratic cost: Q must be n x n and l of length n");
  }
}

double QuadraticCost::state_cost(int, const Vec& s) const {
  return 0.5 * s.dot(Q_ * s) + l_.dot(s);
}

Vec QuadraticCost::state_gradient(int, const Vec& s) const {
  return 0.5 * (Q_ + Q_.transpose()) * s + l_;
}

Mat QuadraticCost::state_hessian(int, const Vec&) const {
  return 0.5 * (Q_ + Q_.transpose());
}

// ---------------------------------------------------------------------------
// GameSpec

void GameSpec::validate() const {
  if (!dynamics) throw ShapeError("game has no dynamics");
  if (horizon < 1) throw ShapeError("horizon must be >= 1");
  const int n = state_dim();
  const auto dims = action_dims();
  const int N = static_cast<int>(dims.size());
  if (N < 1) throw ShapeError("game needs at least one agent");
  if (static_cast<int>(costs.size()) != N) {
    throw ShapeError("one cost model per agent required");
  }
  if (static_cast<int>(temperatures.size()) != N) {
    throw ShapeError("one temperature per agent required");
  }
  if (noise.state_dim() != n) throw ShapeError("noise gain rows must equal n");
  if (initial_state.mean().size() != n) {
    throw ShapeError("initial state has wrong dimension");
  }
  for (int i = 0; i < N; ++i) {
    if (!(temperatures[i] > 0.0)) throw ShapeError("temperatures must be > 0");
    if (!costs[i]) throw ShapeError("missing cost model");
    const auto& R = costs[i]->action_weights();
    if (static_cast<int>(R.size()) != N) {
      throw ShapeError("cost of agent " + std::to_string(i) +
                       " needs one action weight per agent");
    }
    for (int j = 0; j < N; ++j) {
      if (R[j].rows() != dims[j] || R[j].cols() != dims[j]) {
        throw ShapeError("R^{ij} has wrong shape");
      }
    }
    Eigen::LLT<Mat> llt(R[i]);
    if (llt.info() != Eigen::Success) {
      throw CovarianceError("R^{ii} of agent " + std::to_string(i) +
                                " is not positive definite",
                            i, -1);
    }
  }
}

void check_batch(const TrajectoryBatch& batch, int state_dim,
                 const std::vector<int>& action_dims, int horizon) {
  const std::size_t N = action_dims.size();
  for (std::size_t b = 0; b < batch.size(); ++b) {
    const auto& tr = batch[b];
    const std::string where = "trajectory " + std::to_string(b);
    if (tr.horizon() != horizon || static_cast<int>(tr.actions.size()) != horizon) {
      throw ShapeError(where + ": horizon mismatch");
    }
    for (int k = 0; k < horizon; ++k) {
      if (tr.states[k].size() != state_dim) throw ShapeError(where + ": state dim mismatch");
      if (!tr.states[k].allFinite()) throw ShapeError(where + ": non-finite state");
      if (tr.actions[k].size() != N) throw ShapeError(where + ": agent count mismatch");
      for (std::size_t i = 0; i < N; ++i) {
        if (tr.actions[k][i].size() != action_dims[i]) {
          throw ShapeError(where + ": action dim mismatch");
        }
        if (!tr.actions[k][i].allFinite()) throw ShapeError(where + ": non-finite action");
      }
    }
  }
}

// ---------------------------------------------------------------------------
// Policies

AffineGaussianPolicySet AffineGaussianPolicySet::zeros(
    int state_dim, const std::vector<int>& action_dims, int horizon) {
  AffineGaussianPolicySet set;
  const std::size_t N = action_dims.size();
  set.nominal_states.assign(horizon, Vec::Zero(state_dim));
  set.nominal_actions.resize(horizon);
  set.stages.resize(horizon);
  for (int k = 0; k < horizon; ++k) {
    for (std::size_t i = 0; i < N; ++i) {
      const int m = action_dims[i];
      set.nominal_actions[k].push_back(Vec::Zero(m));
      set.stages[k].push_back(
          {Mat::Zero(m, state_dim), Vec::Zero(m), Mat::Identity(m, m)});
    }
  }
  return set;
}

Vec AffineGaussianPolicySet::mean_action(int k, int agent, const Vec& state) const {
  const auto& st = stages[k][agent];
  return nominal_actions[k][agent] - st.gain * (state - nominal_states[k]) - st.offset;
}

Vec AffineGaussianPolicySet::global_offset(int k, int agent) const {
  const auto& st = stages[k][agent];
  return st.offset - nominal_actions[k][agent] - st.gain * nominal_states[k];
}

void AffineGaussianPolicySet::validate(int state_dim,
                                       const std::vector<int>& action_dims) const {
  const int T = horizon();
  const std::size_t N = action_dims.size();
  if (static_cast<int>(nominal_states.size()) != T ||
      static_cast<int>(nominal_actions.size()) != T) {
    throw ShapeError("policy nominal trajectory length mismatch");
  }
  for (int k = 0; k < T; ++k) {
    if (nominal_states[k].size() != state_dim) throw ShapeError("policy nominal state dim");
    if (stages[k].size() != N || nominal_actions[k].size() != N) {
      throw ShapeError("policy agent count mismatch");
    }
    for (std::size_t i = 0; i < N; ++i) {
      const int m = action_dims[i];
      const auto& st = stages[k][i];
      if (st.gain.rows() != m || st.gain.cols() != state_dim || st.offset.size() != m ||
          st.covariance.rows() != m || st.covariance.cols() != m ||
          nominal_actions[k][i].size() != m) {
        throw ShapeError("policy stage shape mismatch at t=" + std::to_string(k + 1));
      }
    }
  }
}

// ---------------------------------------------------------------------------
// Rollouts

Trajectory simulate_mean(const GameSpec& game,
                         const AffineGaussianPolicySet& policies,
                         const Vec& initial_state) {
  const int T = game.horizon;
  const int N = game.num_agents();
  if (initial_state.size() != game.state_dim()) {
    throw ShapeError("initial state has wrong dimension");
  }
  if (policies.horizon() != T) throw ShapeError("policy horizon mismatch");

  Trajectory tr;
  tr.states.reserve(T);
  tr.actions.reserve(T);
  Vec s = initial_state;
  check_state(s, 1);
  for (int k = 0; k < T; ++k) {
    JointAction a(N);
    for (int i = 0; i < N; ++i) a[i] = policies.mean_action(k, i, s);
    tr.states.push_back(s);
    if (k + 1 < T) {
      s = game.dynamics->step(k + 1, s, a);
      check_state(s, k + 2);
    }
    tr.actions.push_back(std::move(a));
  }
  return tr;
}

PolicySampler::PolicySampler(const GameSpec& game,
                             const AffineGaussianPolicySet& policies)
    : game_(game), policies_(policies) {
  const int T = game.horizon;
  const int N = game.num_agents();
  if (policies.horizon() != T) throw ShapeError("policy horizon mismatch");
  factors_.resize(T);
  for (int k = 0; k < T; ++k) {
    for (int i = 0; i < N; ++i) {
      const Mat& cov = policies.stages[k][i].covariance;
      Eigen::LLT<Mat> llt(0.5 * (cov + cov.transpose()));
      if (llt.info() != Eigen::Success || !cov.allFinite()) {
        throw CovarianceError("policy covariance of agent " + std::to_string(i) +
                                  " at t=" + std::to_string(k + 1) +
                                  " is not positive definite",
                              i, k + 1);
      }
      factors_[k].push_back(llt.matrixL());
    }
  }
}

Trajectory PolicySampler::rollout(const Vec& initial_state, Rng& rng) const {
  const int T = game_.horizon;
  const int N = game_.num_agents();
  if (initial_state.size() != game_.state_dim()) {
    throw ShapeError("initial state has wrong dimension");
  }
  Trajectory tr;
  tr.states.reserve(T);
  tr.actions.reserve(T);
  Vec s = initial_state;
  check_state(s, 1);
  for (int k = 0; k < T; ++k) {
    JointAction a(N);
    for (int i = 0; i < N; ++i) {
      const Mat& L = factors_[k][i];
      a[i] = policies_.mean_action(k, i, s) +
             L * standard_normal(static_cast<int>(L.rows()), rng);
    }
    tr.states.push_back(s);
    if (k + 1 < T) {
      s = game_.dynamics->step(k + 1, s, a);
      if (!game_.noise.is_zero()) s += game_.noise.sample(rng);
      check_state(s, k + 2);
    }
    tr.actions.push_back(std::move(a));
  }
  return tr;
}

Trajectory PolicySampler::sample(std::uint64_t seed) const {
  Rng rng(seed);
  const Vec s1 = game_.initial_state.sample(rng);
  Trajectory tr = rollout(s1, rng);
  tr.seed = seed;
  return tr;
}

TrajectoryBatch PolicySampler::sample_batch(int count, std::uint64_t base_seed) const {
  TrajectoryBatch batch;
  batch.reserve(count);
  for (int j = 0; j < count; ++j) batch.push_back(sample(base_seed + j));
  return batch;
}

Trajectory simulate_stochastic(const GameSpec& game,
                               const AffineGaussianPolicySet& policies,
                               const Vec& initial_state, std::uint64_t seed) {
  PolicySampler sampler(game, policies);
  Rng rng(seed);
  Trajectory tr = sampler.rollout(initial_state, rng);
  tr.seed = seed;
  return tr;
}

Vec evaluate_cost(const GameSpec& game, const Trajectory& trajectory) {
  const int N = game.num_agents();
  check_batch({trajectory}, game.state_dim(), game.action_dims(), trajectory.horizon());
  Vec total = Vec::Zero(N);
  for (int k = 0; k < trajectory.horizon(); ++k) {
    for (int i = 0; i < N; ++i) {
      total(i) += game.costs[i]->stage_cost(k + 1, trajectory.states[k],
                                            trajectory.actions[k]);
    }
  }
  return total;
}

}  // namespace ece
