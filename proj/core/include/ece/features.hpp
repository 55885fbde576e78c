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

#ifndef ECE_FEATURES_HPP_
#define ECE_FEATURES_HPP_

#include <memory>
#include <string>
#include <vector>

#include "ece/game.hpp"

namespace ece {

enum class FeatureKind {
  kReferenceTracking,  // ||p_t^i - ref_t||^2, ref on the start-goal segment
  kControlEffort,      // ||a_t^i||^2
  kGaussianProximity,  // exp(-||p_t^i - p_t^j||^2 / (2 sigma^2))
};

struct FeatureDescriptor {
  FeatureKind kind = FeatureKind::kControlEffort;
  Vec start;             // tracking
  Vec goal;              // tracking
  int other_agent = -1;  // proximity
  double sigma = 1.0;    // proximity

  static FeatureDescriptor tracking(Vec start, Vec goal);
  static FeatureDescriptor effort();
  static FeatureDescriptor proximity(int other_agent, double sigma);

  // "reference_tracking", "control_effort", "gaussian_proximity_<j>".
  std::string name() const;
};

struct AgentFeatures {
  std::vector<int> position_indices;  // where agent i's position sits in s
  std::vector<FeatureDescriptor> features;
};

// phi^i for every agent over a fixed horizon.
class FeatureBasis {
 public:
  FeatureBasis() = default;
  FeatureBasis(int horizon, std::vector<AgentFeatures> agents);

  int horizon() const { return horizon_; }
  int num_agents() const { return static_cast<int>(agents_.size()); }
  int num_features(int agent) const {
    return static_cast<int>(agents_[agent].features.size());
  }
  const AgentFeatures& agent(int i) const { return agents_[i]; }

  Vec position(int agent, const Vec& state) const;
  // Uniform constant-velocity samples: ref_1 = start, ref_T = goal.
  Vec reference(int agent, int feature, int t) const;

  double value(int agent, int feature, int t, const Vec& state,
               const JointAction& actions) const;
  Vec values(int agent, int t, const Vec& state, const JointAction& actions) const;

  // Derivatives with respect to the full state; zero for action features.
  Vec state_gradient(int agent, int feature, int t, const Vec& state) const;
  Mat state_hessian(int agent, int feature, int t, const Vec& state) const;

  bool depends_on_state(int agent, int feature) const;
  // Index of the agent's first control-effort feature, -1 if none.
  int effort_index(int agent) const;

 private:
  int horizon_ = 0;
  std::vector<AgentFeatures> agents_;
};

// w^i per agent, aligned with the basis.
using WeightVector = std::vector<Vec>;

// Per-agent sum over t = 1..T of phi^i(s_t, a_t).
std::vector<Vec> eval_features(const FeatureBasis& basis, const Trajectory& trajectory);

// c^i = w^i' phi^i. State features form v^i(s); effort features give
// R^{ii} = (sum of effort weights) I and R^{ij} = 0 for j != i.
class FeatureCost final : public CostModel {
 public:
  FeatureCost(const FeatureBasis& basis, Vec weights, int agent,
              const std::vector<int>& action_dims);

  double state_cost(int t, const Vec& state) const override;
  Vec state_gradient(int t, const Vec& state) const override;
  Mat state_hessian(int t, const Vec& state) const override;
  const std::vector<Mat>& action_weights() const override { return R_; }

 private:
  FeatureBasis basis_;
  Vec weights_;
  int agent_;
  std::vector<Mat> R_;
};

// Throws InvalidWeightError when the effective effort weight is <= 0.
std::shared_ptr<const CostModel> make_cost_model(const FeatureBasis& basis,
                                                 const WeightVector& weights,
                                                 int agent,
                                                 const std::vector<int>& action_dims);

std::vector<std::shared_ptr<const CostModel>> make_cost_models(
    const FeatureBasis& basis, const WeightVector& weights,
    const std::vector<int>& action_dims);

}  // namespace ece

#endif  // ECE_FEATURES_HPP_
