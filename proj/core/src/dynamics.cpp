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

#include "ece/dynamics.hpp"

#include <cmath>

namespace ece {
namespace {

void check_actions(const JointAction& actions, const std::vector<int>& dims) {
  if (actions.size() != dims.size()) throw ShapeError("wrong number of agent actions");
  for (std::size_t j = 0; j < dims.size(); ++j) {
    if (actions[j].size() != dims[j]) throw ShapeError("action dimension mismatch");
  }
}

}  // namespace

LinearDynamics::LinearDynamics(Mat A, std::vector<Mat> B)
    : A_(std::move(A)), B_(std::move(B)) {
  if (A_.rows() != A_.cols()) throw ShapeError("A must be square");
  for (const auto& b : B_) {
    if (b.rows() != A_.rows()) throw ShapeError("B^j must have n rows");
    dims_.push_back(static_cast<int>(b.cols()));
  }
}

Vec LinearDynamics::step(int, const Vec& s, const JointAction& a) const {
  check_actions(a, dims_);
  Vec next = A_ * s;
  for (std::size_t j = 0; j < B_.size(); ++j) next.noalias() += B_[j] * a[j];
  return next;
}

LinearStage LinearDynamics::linearize(int, const Vec&, const JointAction& a) const {
  check_actions(a, dims_);
  return {A_, B_};
}

PointMassDynamics::PointMassDynamics(int num_agents, double dt)
    : num_agents_(num_agents), dt_(dt) {
  if (num_agents < 1) throw ShapeError("point mass needs at least one agent");
  if (!(dt > 0.0)) throw ShapeError("dt must be positive");
}

Vec PointMassDynamics::step(int, const Vec& s, const JointAction& a) const {
  check_actions(a, action_dims());
  Vec next = s;
  const double half_dt2 = 0.5 * dt_ * dt_;
  for (int i = 0; i < num_agents_; ++i) {
    const int o = 4 * i;
    for (int d = 0; d < 2; ++d) {
      next(o + d) = s(o + d) + dt_ * s(o + 2 + d) + half_dt2 * a[i](d);
      next(o + 2 + d) = s(o + 2 + d) + dt_ * a[i](d);
    }
  }
  return next;
}

LinearStage PointMassDynamics::linearize(int, const Vec&, const JointAction& a) const {
  check_actions(a, action_dims());
  const int n = state_dim();
  LinearStage lin{Mat::Identity(n, n), {}};
  for (int i = 0; i < num_agents_; ++i) {
    const int o = 4 * i;
    lin.A(o, o + 2) = dt_;
    lin.A(o + 1, o + 3) = dt_;
    Mat B = Mat::Zero(n, 2);
    B(o, 0) = B(o + 1, 1) = 0.5 * dt_ * dt_;
    B(o + 2, 0) = B(o + 3, 1) = dt_;
    lin.B.push_back(std::move(B));
  }
  return lin;
}

UnicycleDynamics::UnicycleDynamics(int num_agents, double dt)
    : num_agents_(num_agents), dt_(dt) {
  if (num_agents < 1) throw ShapeError("unicycle needs at least one agent");
  if (!(dt > 0.0)) throw ShapeError("dt must be positive");
}

Vec UnicycleDynamics::step(int, const Vec& s, const JointAction& a) const {
  check_actions(a, action_dims());
  Vec next = s;
  for (int i = 0; i < num_agents_; ++i) {
    const int o = 3 * i;
    const double theta = s(o + 2);
    next(o) += dt_ * a[i](0) * std::cos(theta);
    next(o + 1) += dt_ * a[i](0) * std::sin(theta);
    next(o + 2) += dt_ * a[i](1);
  }
  return next;
}

LinearStage UnicycleDynamics::linearize(int, const Vec& s, const JointAction& a) const {
  check_actions(a, action_dims());
  const int n = state_dim();
  LinearStage lin{Mat::Identity(n, n), {}};
  for (int i = 0; i < num_agents_; ++i) {
    const int o = 3 * i;
    const double c = std::cos(s(o + 2));
    const double sn = std::sin(s(o + 2));
    const double v = a[i](0);
    lin.A(o, o + 2) = -dt_ * v * sn;
    lin.A(o + 1, o + 2) = dt_ * v * c;
    Mat B = Mat::Zero(n, 2);
    B(o, 0) = dt_ * c;
    B(o + 1, 0) = dt_ * sn;
    B(o + 2, 1) = dt_;
    lin.B.push_back(std::move(B));
  }
  return lin;
}

}  // namespace ece
