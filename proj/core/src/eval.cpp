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

#include "ece/eval.hpp"

#include <algorithm>
#include <cmath>

namespace ece {
namespace {

std::vector<double> histogram_masses(const std::vector<double>& samples, double lo,
                                     double hi, const HistogramSpec& spec) {
  std::vector<double> counts(spec.bins, 0.0);
  const double width = (hi - lo) / spec.bins;
  for (double x : samples) {
    int b = static_cast<int>(std::floor((x - lo) / width));
    b = std::clamp(b, 0, spec.bins - 1);
    counts[b] += 1.0;
  }
  double total = 0.0;
  for (auto& c : counts) {
    c = c / static_cast<double>(samples.size()) + spec.smoothing;
    total += c;
  }
  for (auto& c : counts) c /= total;
  return counts;
}

}  // namespace

void HistogramSpec::validate() const {
  if (bins < 2) throw ConfigError("histogram.bins must be >= 2");
  if (!(smoothing > 0.0)) throw ConfigError("histogram.smoothing must be > 0");
}

double kl_from_masses(const std::vector<double>& p, const std::vector<double>& q) {
  if (p.size() != q.size()) throw ShapeError("KL masses differ in length");
  double kl = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) {
    if (p[k] > 0.0) kl += p[k] * std::log(p[k] / q[k]);
  }
  return kl;
}

double kl_divergence(const std::vector<double>& p_samples,
                     const std::vector<double>& q_samples, const HistogramSpec& spec) {
  spec.validate();
  if (p_samples.empty() || q_samples.empty()) throw Error("KL of an empty sample");
  const auto [p_lo, p_hi] = std::minmax_element(p_samples.begin(), p_samples.end());
  const auto [q_lo, q_hi] = std::minmax_element(q_samples.begin(), q_samples.end());
  const double lo = std::min(*p_lo, *q_lo);
  const double hi = std::max(*p_hi, *q_hi);
  if (!(hi > lo)) return 0.0;
  const auto p = histogram_masses(p_samples, lo, hi, spec);
  const auto q = histogram_masses(q_samples, lo, hi, spec);
  return std::max(0.0, kl_from_masses(p, q));
}

std::vector<std::vector<double>> kl_divergence_per_feature(const TrajectoryBatch& demo,
                                                           const TrajectoryBatch& model,
                                                           const FeatureBasis& basis,
                                                           const HistogramSpec& spec) {
  if (demo.empty() || model.empty()) throw Error("KL needs non-empty batches");
  const int N = basis.num_agents();
  auto collect = [&](const TrajectoryBatch& batch) {
    std::vector<std::vector<std::vector<double>>> out(N);
    for (int i = 0; i < N; ++i) out[i].resize(basis.num_features(i));
    for (const auto& tr : batch) {
      const auto sums = eval_features(basis, tr);
      for (int i = 0; i < N; ++i) {
        for (int k = 0; k < sums[i].size(); ++k) out[i][k].push_back(sums[i](k));
      }
    }
    return out;
  };
  const auto d = collect(demo);
  const auto m = collect(model);
  std::vector<std::vector<double>> kl(N);
  for (int i = 0; i < N; ++i) {
    for (int k = 0; k < basis.num_features(i); ++k) {
      kl[i].push_back(kl_divergence(d[i][k], m[i][k], spec));
    }
  }
  return kl;
}

std::vector<DistanceStats> goal_distance_stats(const TrajectoryBatch& batch,
                                               const FeatureBasis& basis,
                                               const std::vector<Vec>& goals) {
  const int N = basis.num_agents();
  if (static_cast<int>(goals.size()) != N) throw ShapeError("one goal per agent required");
  if (batch.empty()) throw Error("goal distances of an empty batch");
  std::vector<DistanceStats> stats(N);
  for (int i = 0; i < N; ++i) {
    std::vector<double> dist;
    for (const auto& tr : batch) {
      const Vec p = basis.position(i, tr.states.back());
      if (p.size() != goals[i].size()) throw ShapeError("goal dimension mismatch");
      dist.push_back((p - goals[i]).norm());
    }
    double mean = 0.0;
    for (double x : dist) mean += x;
    mean /= static_cast<double>(dist.size());
    double var = 0.0;
    for (double x : dist) var += (x - mean) * (x - mean);
    stats[i].mean = mean;
    stats[i].stddev =
        dist.size() > 1 ? std::sqrt(var / static_cast<double>(dist.size() - 1)) : 0.0;
  }
  return stats;
}

std::vector<double> trajectory_rmse(const Trajectory& reference,
                                    const TrajectoryBatch& rollouts,
                                    const FeatureBasis& basis, int horizon_cut) {
  if (horizon_cut > reference.horizon()) throw ShapeError("horizon_cut exceeds T");
  if (rollouts.empty()) throw Error("RMSE of an empty batch");
  const int N = basis.num_agents();
  std::vector<double> rmse(horizon_cut, 0.0);
  for (int k = 0; k < horizon_cut; ++k) {
    double sq = 0.0;
    for (const auto& tr : rollouts) {
      if (tr.horizon() < horizon_cut) throw ShapeError("rollout shorter than horizon_cut");
      for (int i = 0; i < N; ++i) {
        sq += (basis.position(i, tr.states[k]) - basis.position(i, reference.states[k]))
                  .squaredNorm();
      }
    }
    rmse[k] = std::sqrt(sq / static_cast<double>(rollouts.size() * N));
  }
  return rmse;
}

Trajectory mean_trajectory(const TrajectoryBatch& batch) {
  if (batch.empty()) throw Error("mean of an empty batch");
  Trajectory mean = batch.front();
  for (std::size_t b = 1; b < batch.size(); ++b) {
    for (int k = 0; k < mean.horizon(); ++k) {
      mean.states[k] += batch[b].states[k];
      for (std::size_t i = 0; i < mean.actions[k].size(); ++i) {
        mean.actions[k][i] += batch[b].actions[k][i];
      }
    }
  }
  const double count = static_cast<double>(batch.size());
  for (int k = 0; k < mean.horizon(); ++k) {
    mean.states[k] /= count;
    for (auto& a : mean.actions[k]) a /= count;
  }
  mean.seed = 0;
  return mean;
}

std::map<std::string, double> task_statistics(const TrajectoryBatch& batch,
                                              const FeatureBasis& basis,
                                              const TaskStatisticsConfig& config) {
  if (batch.empty()) throw Error("task statistics of an empty batch");
  const Eigen::Index n = batch.front().states.front().size();
  std::map<std::string, double> out;
  for (const auto& [name, indices] : config.speeds) {
    if (indices.empty()) throw ConfigError("speed '" + name + "' names no state components");
    for (int idx : indices) {
      if (idx < 0 || idx >= n) {
        throw ConfigError("speed '" + name + "' names state component " +
                          std::to_string(idx) + " outside the state");
      }
    }
    double sum = 0.0;
    std::size_t count = 0;
    for (const auto& tr : batch) {
      for (const auto& s : tr.states) {
        double sq = 0.0;
        for (int idx : indices) sq += s(idx) * s(idx);
        sum += std::sqrt(sq);
        ++count;
      }
    }
    out[name] = sum / static_cast<double>(count);
  }
  for (const auto& [name, pair] : config.distances) {
    const auto [a, b] = pair;
    if (a < 0 || b < 0 || a >= basis.num_agents() || b >= basis.num_agents()) {
      throw ConfigError("distance '" + name + "' names an unknown agent");
    }
    double sum = 0.0;
    std::size_t count = 0;
    for (const auto& tr : batch) {
      for (const auto& s : tr.states) {
        sum += (basis.position(a, s) - basis.position(b, s)).norm();
        ++count;
      }
    }
    out[name] = sum / static_cast<double>(count);
  }
  return out;
}

}  // namespace ece
