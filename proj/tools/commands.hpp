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

// Experiment commands behind the `ece` executable. Each returns a process
// exit code and reports problems on `err`.

#ifndef ECE_TOOLS_COMMANDS_HPP_
#define ECE_TOOLS_COMMANDS_HPP_

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

namespace ece::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

struct GenDemosArgs {
  std::string config;
  int trials = 200;
  std::uint64_t seed = 0;
  std::string out;
};

struct SolveArgs {
  std::string config;
  std::string weights;  // empty: the config's true weights
  std::string out_policy;
  std::string trace;
  bool strict_paper = false;
};

struct SampleArgs {
  std::string config;
  std::string policy;
  int trials = 1;
  std::uint64_t seed = 0;
  std::string out;
};

struct LearnArgs {
  std::string config;
  std::string demos;
  std::optional<std::string> mode;
  std::optional<double> learning_rate;
  std::optional<int> samples;
  std::optional<int> max_iterations;
  std::optional<std::uint64_t> seed;
  std::string out_weights;
  std::string trace;
};

struct EvalArgs {
  std::string config;
  std::string demos;
  std::string weights;       // solve and sample under these
  std::string model_demos;   // or compare against this trajectory file
  int trials = 200;
  std::uint64_t seed = 0;
  std::string out;           // directory for kl.csv, goal_distance.csv, rmse.csv
};

struct ValidateArgs {
  std::string config;
  std::string file;
};

int gen_demos(const GenDemosArgs& args, std::ostream& out, std::ostream& err);
int solve(const SolveArgs& args, std::ostream& out, std::ostream& err);
int sample(const SampleArgs& args, std::ostream& out, std::ostream& err);
int learn(const LearnArgs& args, std::ostream& out, std::ostream& err);
int eval(const EvalArgs& args, std::ostream& out, std::ostream& err);
int validate(const ValidateArgs& args, std::ostream& out, std::ostream& err);

}  // namespace ece::cli

#endif  // ECE_TOOLS_COMMANDS_HPP_
