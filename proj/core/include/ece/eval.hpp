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

#ifndef ECE_EVAL_HPP_
#define ECE_EVAL_HPP_

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "ece/features.hpp"
#include "ece/game.hpp"

namespace ece {

// Shared-range histogram used for every KL estimate. Bins span the pooled
// min/max of both samples; `smoothing` is added to every bin's probability
// mass before renormalizing.
struct HistogramSpec {
  int bins = 20;
  double smoothing = 1e-3;

  void validate() const;
  bool operator==(const HistogramSpec&) const = default;
};

// sum_k p_k log(p_k / q_k) over already-normalized masses; terms with
// p_k = 0 contribute 0.
double kl_from_masses(const std::vector<double>& p, const std::vector<double>& q);

// KL(p || q) between two scalar samples. Returns exactly 0 when every value
// in both samples is identical.
double kl_divergence(const std::vector<double>& p_samples,
                     const std::vector<double>& q_samples, const HistogramSpec& spec);

// KL(demo || model) of per-trajectory feature sums, [agent][feature].
std::vector<std::vector<double>> kl_divergence_per_feature(const TrajectoryBatch& demo,
                                                           const TrajectoryBatch& model,
                                                           const FeatureBasis& basis,
                                                           const HistogramSpec& spec);

struct DistanceStats {
  double mean = 0.0;
  double stddev = 0.0;  // sample standard deviation, 0 for a single trajectory
};

// Distance of each agent's position at t = T to its goal.
std::vector<DistanceStats> goal_distance_stats(const TrajectoryBatch& batch,
                                               const FeatureBasis& basis,
                                               const std::vector<Vec>& goals);

// sqrt of the mean over rollouts and agents of the squared position error,
// for t = 1..horizon_cut.
std::vector<double> trajectory_rmse(const Trajectory& reference,
                                    const TrajectoryBatch& rollouts,
                                    const FeatureBasis& basis, int horizon_cut);

// Per-time mean of a batch (states and actions).
Trajectory mean_trajectory(const TrajectoryBatch& batch);

struct TaskStatisticsConfig {
  // name -> state indices forming a velocity vector
  std::vector<std::pair<std::string, std::vector<int>>> speeds;
  // name -> (agent a, agent b) whose positions are compared
  std::vector<std::pair<std::string, std::pair<int, int>>> distances;
};

// Averages over time and trajectories; keys are the configured names.
// Throws ConfigError for indices outside the state or unknown agents.
std::map<std::string, double> task_statistics(const TrajectoryBatch& batch,
                                              const FeatureBasis& basis,
                                              const TaskStatisticsConfig& config);

}  // namespace ece

#endif  // ECE_EVAL_HPP_
