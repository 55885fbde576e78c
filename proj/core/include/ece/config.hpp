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

// Scenario configuration: a versioned JSON document describing a game and
// the solver, learner and histogram settings used on it.
//
//   {
//     "schema_version": 1,
//     "name": "crossing",
//     "horizon": 25,
//     "dynamics": {"kind": "point_mass", "dt": 0.2},
//     "noise": {"gain": [[...]], "covariance": 0.01},
//     "initial_state": {"mean": [...], "covariance": 0.04},
//     "agents": [{"start": [0, 0], "goal": [6, 0],
//                 "features": [{"kind": "reference_tracking"},
//                              {"kind": "control_effort"},
//                              {"kind": "gaussian_proximity", "other": 1,
//                               "sigma": 1.0}],
//                 "true_weights": [1, 0.5, 4]}, ...],
//     "solver": {...}, "learner": {...}, "histogram": {...}
//   }
//
// Matrices are arrays of rows; "gain"/"covariance" also accept a scalar c
// meaning c * I. Unknown keys are errors.

#ifndef ECE_CONFIG_HPP_
#define ECE_CONFIG_HPP_

#include <string>
#include <vector>

#include "ece/eval.hpp"
#include "ece/features.hpp"
#include "ece/game.hpp"
#include "ece/ilq_ece.hpp"
#include "ece/irl.hpp"

namespace ece {

inline constexpr int kScenarioSchemaVersion = 1;

struct DynamicsConfig {
  std::string kind;  // "linear", "point_mass" or "unicycle"
  double dt = 0.1;   // point_mass and unicycle
  Mat A;             // linear
  std::vector<Mat> B;
};

struct FeatureConfig {
  std::string kind;  // "reference_tracking", "control_effort", "gaussian_proximity"
  int other = -1;
  double sigma = 1.0;
};

struct AgentConfig {
  Vec start;
  Vec goal;
  std::vector<int> position_indices;
  std::vector<FeatureConfig> features;
  Vec true_weights;  // empty when unknown
  Vec init_weights;  // learner start, defaults to all ones
  double temperature = 1.0;
};

struct ScenarioConfig {
  int schema_version = kScenarioSchemaVersion;
  std::string name;
  int horizon = 1;
  DynamicsConfig dynamics;
  Mat noise_gain;
  Mat noise_covariance;
  Vec initial_mean;
  Mat initial_covariance;
  std::vector<AgentConfig> agents;
  SolverConfig solver;
  LearnConfig learner;
  HistogramSpec histogram;

  int num_agents() const { return static_cast<int>(agents.size()); }
};

bool operator==(const ScenarioConfig& a, const ScenarioConfig& b);

// Throws ConfigError with the offending key path.
ScenarioConfig parse_scenario(const std::string& json_text);
ScenarioConfig load_scenario(const std::string& path);
// Fully explicit form; parse_scenario(serialize_scenario(c)) == c.
std::string serialize_scenario(const ScenarioConfig& config);

std::shared_ptr<const DynamicsModel> build_dynamics(const ScenarioConfig& config);
FeatureBasis build_basis(const ScenarioConfig& config);
LearningProblem build_problem(const ScenarioConfig& config);
GameSpec build_game(const ScenarioConfig& config, const WeightVector& weights);

bool has_true_weights(const ScenarioConfig& config);
WeightVector true_weights(const ScenarioConfig& config);
WeightVector initial_weights(const ScenarioConfig& config);
std::vector<Vec> goals(const ScenarioConfig& config);

}  // namespace ece

#endif  // ECE_CONFIG_HPP_
