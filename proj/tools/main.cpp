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

#include <iostream>

#include "CLI11.hpp"
#include "commands.hpp"

int main(int argc, char** argv) {
  using namespace ece::cli;
  CLI::App app{"Entropic cost equilibria: solve, sample, learn and evaluate"};
  app.require_subcommand(1);

  GenDemosArgs gen;
  auto* gen_cmd = app.add_subcommand("gen-demos", "Sample demonstrations under the true weights");
  gen_cmd->add_option("--config", gen.config, "Scenario JSON")->required()->check(CLI::ExistingFile);
  gen_cmd->add_option("--trials", gen.trials, "Number of rollouts")->capture_default_str();
  gen_cmd->add_option("--seed", gen.seed, "Seed of the first rollout")->capture_default_str();
  gen_cmd->add_option("--out", gen.out, "Trajectory CSV")->required();

  SolveArgs sol;
  auto* solve_cmd = app.add_subcommand("solve", "Solve for the equilibrium policy set");
  solve_cmd->add_option("--config", sol.config, "Scenario JSON")->required()->check(CLI::ExistingFile);
  solve_cmd->add_option("--weights", sol.weights, "Weights JSON (default: true weights)")
      ->check(CLI::ExistingFile);
  solve_cmd->add_option("--out-policy", sol.out_policy, "Policy JSON");
  solve_cmd->add_option("--trace", sol.trace, "Iteration trace CSV");
  solve_cmd->add_flag("--strict-paper", sol.strict_paper,
                      "Drop linear cost terms and nominal-action offsets in the LQ step");

  SampleArgs smp;
  auto* sample_cmd = app.add_subcommand("sample", "Roll out a stored policy set");
  sample_cmd->add_option("--config", smp.config, "Scenario JSON")->required()->check(CLI::ExistingFile);
  sample_cmd->add_option("--policy", smp.policy, "Policy JSON")->required()->check(CLI::ExistingFile);
  sample_cmd->add_option("--trials", smp.trials, "Number of rollouts")->capture_default_str();
  sample_cmd->add_option("--seed", smp.seed, "Seed of the first rollout")->capture_default_str();
  sample_cmd->add_option("--out", smp.out, "Trajectory CSV")->required();

  LearnArgs lrn;
  auto* learn_cmd = app.add_subcommand("learn", "Learn cost weights from demonstrations");
  learn_cmd->add_option("--config", lrn.config, "Scenario JSON")->required()->check(CLI::ExistingFile);
  learn_cmd->add_option("--demos", lrn.demos, "Trajectory CSV")->required()->check(CLI::ExistingFile);
  learn_cmd->add_option("--mode", lrn.mode, "joint or independent");
  learn_cmd->add_option("--lr", lrn.learning_rate, "Learning rate");
  learn_cmd->add_option("--samples", lrn.samples, "Rollouts per feature expectation");
  learn_cmd->add_option("--max-iterations", lrn.max_iterations, "Outer iterations");
  learn_cmd->add_option("--seed", lrn.seed, "Sampling seed");
  learn_cmd->add_option("--out-weights", lrn.out_weights, "Weights JSON");
  learn_cmd->add_option("--trace", lrn.trace, "Learning trace CSV");

  EvalArgs ev;
  auto* eval_cmd = app.add_subcommand("eval", "Compare demonstrations with model rollouts");
  eval_cmd->add_option("--config", ev.config, "Scenario JSON")->required()->check(CLI::ExistingFile);
  eval_cmd->add_option("--demos", ev.demos, "Trajectory CSV")->required()->check(CLI::ExistingFile);
  eval_cmd->add_option("--weights", ev.weights, "Weights JSON")->check(CLI::ExistingFile);
  eval_cmd->add_option("--model-demos", ev.model_demos, "Model trajectory CSV")
      ->check(CLI::ExistingFile);
  eval_cmd->add_option("--trials", ev.trials, "Number of model rollouts")->capture_default_str();
  eval_cmd->add_option("--seed", ev.seed, "Seed of the first rollout")->capture_default_str();
  eval_cmd->add_option("--out", ev.out, "Output directory")->required();

  ValidateArgs val;
  auto* validate_cmd = app.add_subcommand("validate", "Check a trajectory file against a config");
  validate_cmd->add_option("--config", val.config, "Scenario JSON")->required()->check(CLI::ExistingFile);
  validate_cmd->add_option("--file", val.file, "Trajectory CSV")->required()->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  if (*gen_cmd) return gen_demos(gen, std::cout, std::cerr);
  if (*solve_cmd) return solve(sol, std::cout, std::cerr);
  if (*sample_cmd) return sample(smp, std::cout, std::cerr);
  if (*learn_cmd) return learn(lrn, std::cout, std::cerr);
  if (*eval_cmd) return eval(ev, std::cout, std::cerr);
  return validate(val, std::cout, std::cerr);
}
