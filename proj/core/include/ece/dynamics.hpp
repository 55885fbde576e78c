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

#ifndef ECE_DYNAMICS_HPP_
#define ECE_DYNAMICS_HPP_

#include <vector>

#include "ece/game.hpp"

namespace ece {

// s_{t+1} = A s_t + sum_j B^j a_t^j, time invariant.
class LinearDynamics final : public DynamicsModel {
 public:
  LinearDynamics(Mat A, std::vector<Mat> B);

  int state_dim() const override { return static_cast<int>(A_.rows()); }
  std::vector<int> action_dims() const override { return dims_; }
  Vec step(int t, const Vec& state, const JointAction& actions) const override;
  LinearStage linearize(int t, const Vec& state,
                        const JointAction& actions) const override;

  const Mat& A() const { return A_; }
  const std::vector<Mat>& B() const { return B_; }

 private:
  Mat A_;
  std::vector<Mat> B_;
  std::vector<int> dims_;
};

// Planar double integrator per agent, exact zero-order-hold discretization.
// Agent i owns state block [px, py, vx, vy] at offset 4i and action [ax, ay].
class PointMassDynamics final : public DynamicsModel {
 public:
  PointMassDynamics(int num_agents, double dt);

  int state_dim() const override { return 4 * num_agents_; }
  std::vector<int> action_dims() const override {
    return std::vector<int>(num_agents_, 2);
  }
  Vec step(int t, const Vec& state, const JointAction& actions) const override;
  LinearStage linearize(int t, const Vec& state,
                        const JointAction& actions) const override;

  double dt() const { return dt_; }
  static std::vector<int> position_indices(int agent) { return {4 * agent, 4 * agent + 1}; }
  static std::vector<int> velocity_indices(int agent) { return {4 * agent + 2, 4 * agent + 3}; }

 private:
  int num_agents_;
  double dt_;
};

// Kinematic unicycle per agent, forward Euler: state block [x, y, theta] at
// offset 3i, action [v, omega].
class UnicycleDynamics final : public DynamicsModel {
 public:
  UnicycleDynamics(int num_agents, double dt);

  int state_dim() const override { return 3 * num_agents_; }
  std::vector<int> action_dims() const override {
    return std::vector<int>(num_agents_, 2);
  }
  Vec step(int t, const Vec& state, const JointAction& actions) const override;
  LinearStage linearize(int t, const Vec& state,
                        const JointAction& actions) const override;

  double dt() const { return dt_; }
  static std::vector<int> position_indices(int agent) { return {3 * agent, 3 * agent + 1}; }

 private:
  int num_agents_;
  double dt_;
};

}  // namespace ece

#endif  // ECE_DYNAMICS_HPP_
