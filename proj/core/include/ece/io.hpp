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

// File formats: trajectory CSV, policy and weight JSON, trace and metric CSVs.
//
// Trajectory CSV header: trial,t,s_1..s_n,a1_1..a1_m1,...,aN_1..aN_mN with
// one row per (trial, t), rows sorted by trial then t = 1..T. The trial
// column carries the trajectory's sample seed. Doubles use 17 significant
// digits.

#ifndef ECE_IO_HPP_
#define ECE_IO_HPP_

#include <iosfwd>
#include <string>
#include <vector>

#include "ece/eval.hpp"
#include "ece/features.hpp"
#include "ece/game.hpp"
#include "ece/ilq_ece.hpp"
#include "ece/irl.hpp"

namespace ece {

std::string format_double(double x);

std::vector<std::string> trajectory_columns(int state_dim, const std::vector<int>& action_dims);

// Throws ShapeError for inconsistent batches or trial ids that are not
// strictly increasing.
void write_trajectories(std::ostream& out, const TrajectoryBatch& batch);
void write_trajectory_file(const std::string& path, const TrajectoryBatch& batch);

// Reads and validates against the expected dimensions. Throws IngestError
// carrying the 1-based line number of the first bad line.
TrajectoryBatch read_trajectories(std::istream& in, int state_dim,
                                  const std::vector<int>& action_dims);
TrajectoryBatch read_trajectory_file(const std::string& path, int state_dim,
                                     const std::vector<int>& action_dims);

// Policy set as JSON: per time step, per agent gain/offset/covariance with
// explicit dimensions and row-major data, plus the nominal trajectory.
std::string policy_to_json(const AffineGaussianPolicySet& policies);
AffineGaussianPolicySet policy_from_json(const std::string& text);

// {"agents": [{"features": [names], "weights": [values]}, ...]}
std::string weights_to_json(const FeatureBasis& basis, const WeightVector& weights);
WeightVector weights_from_json(const std::string& text, const FeatureBasis& basis);

// iteration,max_deviation,step,cost_1..cost_N
void write_iteration_trace(std::ostream& out, const IterationTrace& trace, int num_agents);
// iteration,agent,residual,solver_iterations,floor_applied,feature,weight,gap
void write_learn_trace(std::ostream& out, const LearnTrace& trace, const FeatureBasis& basis);

// agent,feature,kl
void write_kl_table(std::ostream& out, const std::vector<std::vector<double>>& kl,
                    const FeatureBasis& basis);
// agent,mean_dist,std_dist
void write_goal_distance_table(std::ostream& out, const std::vector<DistanceStats>& stats);
// t,rmse
void write_rmse_table(std::ostream& out, const std::vector<double>& rmse);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

// Plain comma-separated reader; throws IngestError on ragged rows.
CsvTable read_csv_table(std::istream& in);

std::string read_text_file(const std::string& path);
// Writes atomically enough for a single writer: temp file then rename.
void write_text_file(const std::string& path, const std::string& content);

}  // namespace ece

#endif  // ECE_IO_HPP_
