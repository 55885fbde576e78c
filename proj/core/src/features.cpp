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

#include "ece/features.hpp"

#include <cmath>

namespace ece {

FeatureDescriptor FeatureDescriptor::tracking(Vec start, Vec goal) {
  FeatureDescriptor d;
  d.kind = FeatureKind::kReferenceTracking;
  d.start = std::move(start);
  d.goal = std::move(goal);
  return d;
}

FeatureDescriptor FeatureDescriptor::effort() { return {}; }

FeatureDescriptor FeatureDescriptor::proximity(int other_agent, double sigma) {
  FeatureDescriptor d;
  d.kind = FeatureKind::kGaussianProximity;
  d.other_agent = other_agent;
  d.sigma = sigma;
  return d;
}

std::string FeatureDescriptor::name() const {
  switch (kind) {
    case FeatureKind::kReferenceTracking:
      return "reference_tracking";
    case FeatureKind::kControlEffort:
      return "control_effort";
    case FeatureKind::kGaussianProximity:
      return "gaussian_proximity_" + std::to_string(other_agent + 1);
  }
  return "unknown";
}

FeatureBasis::FeatureBasis(int horizon, std::vector<AgentFeatures> agents)
    : horizon_(horizon), agents_(std::move(agents)) {
  if (horizon_ < 1) throw ShapeError("feature basis horizon must be >= 1");
  const int N = num_agents();
  for (int i = 0; i < N; ++i) {
    const auto& ag = agents_[i];
    const auto dim = ag.position_indices.size();
    for (const auto& f : ag.features) {
      switch (f.kind) {
        case FeatureKind::kReferenceTracking:
          if (f.start.size() != static_cast<Eigen::Index>(dim) ||
              f.goal.size() != static_cast<Eigen::Index>(dim) || dim == 0) {
            throw ShapeError("tracking start/goal must match the agent's position dimension");
          }
          break;
        case FeatureKind::kGaussianProximity:
          if (!(f.sigma > 0.0)) throw ShapeError("proximity length scale must be > 0");
          if (f.other_agent < 0 || f.other_agent >= N || f.other_agent == i) {
            throw ShapeError("proximity feature names an invalid other agent");
          }
          if (agents_[f.other_agent].position_indices.size() != dim || dim == 0) {
            throw ShapeError("proximity agents must share a position dimension");
          }
          break;
        case FeatureKind::kControlEffort:
          break;
      }
    }
  }
}

Vec FeatureBasis::position(int agent, const Vec& state) const {
  const auto& idx = agents_[agent].position_indices;
  Vec p(idx.size());
  for (std::size_t d = 0; d < idx.size(); ++d) p(d) = state(idx[d]);
  return p;
}

Vec FeatureBasis::reference(int agent, int feature, int t) const {
  const auto& f = agents_[agent].features[feature];
  const double frac = horizon_ > 1 ? static_cast<double>(t - 1) / (horizon_ - 1) : 0.0;
  return f.start + frac * (f.goal - f.start);
}

bool FeatureBasis::depends_on_state(int agent, int feature) const {
  return agents_[agent].features[feature].kind != FeatureKind::kControlEffort;
}

int FeatureBasis::effort_index(int agent) const {
  const auto& fs = agents_[agent].features;
  for (std::size_t k = 0; k < fs.size(); ++k) {
    if (fs[k].kind == FeatureKind::kControlEffort) return static_cast<int>(k);
  }
  return -1;
}

double FeatureBasis::value(int agent, int feature, int t, const Vec& state,
                           const JointAction& actions) const {
  const auto& f = agents_[agent].features[feature];
  switch (f.kind) {
    case FeatureKind::kReferenceTracking:
      return (position(agent, state) - reference(agent, feature, t)).squaredNorm();
    case FeatureKind::kControlEffort:
      return actions[agent].squaredNorm();
    case FeatureKind::kGaussianProximity: {
      const double d2 = (position(agent, state) - position(f.other_agent, state)).squaredNorm();
      return std::exp(-d2 / (2.0 * f.sigma * f.sigma));
    }
  }
  return 0.0;
}

Vec FeatureBasis::values(int agent, int t, const Vec& state,
                         const JointAction& actions) const {
  Vec v(num_features(agent));
  for (int k = 0; k < v.size(); ++k) v(k) = value(agent, k, t, state, actions);
  return v;
}

Vec FeatureBasis::state_gradient(int agent, int feature, int t, const Vec& state) const {
  const auto& f = agents_[agent].features[feature];
  Vec g = Vec::Zero(state.size());
  const auto& own = agents_[agent].position_indices;
  switch (f.kind) {
    case FeatureKind::kReferenceTracking: {
      const Vec diff = position(agent, state) - reference(agent, feature, t);
      for (std::size_t d = 0; d < own.size(); ++d) g(own[d]) += 2.0 * diff(d);
      break;
    }
    case FeatureKind::kControlEffort:
      break;
    case FeatureKind::kGaussianProximity: {
      const auto& other = agents_[f.other_agent].position_indices;
      const Vec diff = position(agent, state) - position(f.other_agent, state);
      const double s2 = f.sigma * f.sigma;
      const double phi = std::exp(-diff.squaredNorm() / (2.0 * s2));
      for (std::size_t d = 0; d < own.size(); ++d) {
        g(own[d]) += -phi * diff(d) / s2;
        g(other[d]) += phi * diff(d) / s2;
      }
      break;
    }
  }
  return g;
}

Mat FeatureBasis::state_hessian(int agent, int feature, int t, const Vec& state) const {
  const auto& f = agents_[agent].features[feature];
  const Eigen::Index n = state.size();
  Mat H = Mat::Zero(n, n);
  const auto& own = agents_[agent].position_indices;
  switch (f.kind) {
    case FeatureKind::kReferenceTracking:
      for (int idx : own) H(idx, idx) += 2.0;
      break;
    case FeatureKind::kControlEffort:
      break;
    case FeatureKind::kGaussianProximity: {
      (void)t;
      const auto& other = agents_[f.other_agent].position_indices;
      const Vec diff = position(agent, state) - position(f.other_agent, state);
      const double s2 = f.sigma * f.sigma;
      const double phi = std::exp(-diff.squaredNorm() / (2.0 * s2));
      // Hessian in the relative position d = p_i - p_j.
      const Eigen::Index dim = diff.size();
      const Mat Hd = phi * (diff * diff.transpose() / (s2 * s2) -
                            Mat::Identity(dim, dim) / s2);
      for (Eigen::Index a = 0; a < dim; ++a) {
        for (Eigen::Index b = 0; b < dim; ++b) {
          H(own[a], own[b]) += Hd(a, b);
          H(other[a], other[b]) += Hd(a, b);
          H(own[a], other[b]) -= Hd(a, b);
          H(other[a], own[b]) -= Hd(a, b);
        }
      }
      break;
    }
  }
  return H;
}

std::vector<Vec> eval_features(const FeatureBasis& basis, const Trajectory& trajectory) {
  const int N = basis.num_agents();
  if (trajectory.horizon() != basis.horizon()) {
    throw ShapeError("trajectory horizon does not match the feature basis");
  }
  std::vector<Vec> sums(N);
  for (int i = 0; i < N; ++i) sums[i] = Vec::Zero(basis.num_features(i));
  for (int k = 0; k < trajectory.horizon(); ++k) {
    if (static_cast<int>(trajectory.actions[k].size()) != N) {
      throw ShapeError("trajectory agent count does not match the feature basis");
    }
    for (int i = 0; i < N; ++i) {
      sums[i] += basis.values(i, k + 1, trajectory.states[k], trajectory.actions[k]);
    }
  }
  return sums;
}

FeatureCost::FeatureCost(const FeatureBasis& basis, Vec weights, int agent,
                         const std::vector<int>& action_dims)
    : basis_(basis), weights_(std::move(weights)), agent_(agent) {
  if (weights_.size() != basis_.num_features(agent)) {
    throw ShapeError("weight vector of agent " + std::to_string(agent) +
                     " does not match its feature count");
  }
  if (!weights_.allFinite()) throw InvalidWeightError("weights must be finite");
  double effort = 0.0;
  bool has_effort = false;
  for (int k = 0; k < weights_.size(); ++k) {
    if (!basis_.depends_on_state(agent, k)) {
      effort += weights_(k);
      has_effort = true;
    }
  }
  if (!has_effort || !(effort > 0.0)) {
    throw InvalidWeightError("effort weight of agent " + std::to_string(agent) +
                             " must be positive for R^{ii} to be positive definite");
  }
  for (std::size_t j = 0; j < action_dims.size(); ++j) {
    const int m = action_dims[j];
    R_.push_back(static_cast<int>(j) == agent ? Mat(effort * Mat::Identity(m, m))
                                              : Mat(Mat::Zero(m, m)));
  }
}

double FeatureCost::state_cost(int t, const Vec& state) const {
  double c = 0.0;
  const JointAction none;
  for (int k = 0; k < weights_.size(); ++k) {
    if (basis_.depends_on_state(agent_, k)) {
      c += weights_(k) * basis_.value(agent_, k, t, state, none);
    }
  }
  return c;
}

Vec FeatureCost::state_gradient(int t, const Vec& state) const {
  Vec g = Vec::Zero(state.size());
  for (int k = 0; k < weights_.size(); ++k) {
    if (basis_.depends_on_state(agent_, k) && weights_(k) != 0.0) {
      g += weights_(k) * basis_.state_gradient(agent_, k, t, state);
    }
  }
  return g;
}

Mat FeatureCost::state_hessian(int t, const Vec& state) const {
  Mat H = Mat::Zero(state.size(), state.size());
  for (int k = 0; k < weights_.size(); ++k) {
    if (basis_.depends_on_state(agent_, k) && weights_(k) != 0.0) {
      H += weights_(k) * basis_.state_hessian(agent_, k, t, state);
    }
  }
  return H;
}

std::shared_ptr<const CostModel> make_cost_model(const FeatureBasis& basis,
                                                 const WeightVector& weights,
                                                 int agent,
                                                 const std::vector<int>& action_dims) {
  if (static_cast<int>(weights.size()) != basis.num_agents()) {
    throw ShapeError("one weight vector per agent required");
  }
  return std::make_shared<FeatureCost>(basis, weights[agent], agent, action_dims);
}

std::vector<std::shared_ptr<const CostModel>> make_cost_models(
    const FeatureBasis& basis, const WeightVector& weights,
    const std::vector<int>& action_dims) {
  std::vector<std::shared_ptr<const CostModel>> costs;
  for (int i = 0; i < basis.num_agents(); ++i) {
    costs.push_back(make_cost_model(basis, weights, i, action_dims));
  }
  return costs;
}

}  // namespace ece
