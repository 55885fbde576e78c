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

#include "commands.hpp"

#include <filesystem>
#include <ostream>
#include <sstream>

#include "ece/config.hpp"
#include "ece/eval.hpp"
#include "ece/ilq_ece.hpp"
#include "ece/io.hpp"
#include "ece/irl.hpp"

namespace ece::cli {
namespace {

void report(std::ostream& err, const std::exception& e) {
  err << "error: " << e.what();
  if (const auto* s = dynamic_cast<const StageSingularError*>(&e)) {
    err << " [stage t=" << s->time_step() << "]";
  } else if (const auto* c = dynamic_cast<const CovarianceError*>(&e); c && c->time_step() > 0) {
    err << " [stage t=" << c->time_step() << "]";
  } else if (const auto* d = dynamic_cast<const DivergenceError*>(&e)) {
    err << " [stage t=" << d->time_step() << "]";
  } else if (const auto* a = dynamic_cast<const ApproximationError*>(&e)) {
    err << " [stage t=" << a->time_step() << "]";
  } else if (const auto* g = dynamic_cast<const IngestError*>(&e); g && g->line() > 0) {
    err << " [line " << g->line() << "]";
  }
  err << '\n';
}

void write_trace_file(const std::string& path, const IterationTrace& trace, int num_agents) {
  if (path.empty()) return;
  std::ostringstream buf;
  write_iteration_trace(buf, trace, num_agents);
  write_text_file(path, buf.str());
}

WeightVector load_weights(const std::string& path, const ScenarioConfig& config) {
  return weights_from_json(read_text_file(path), build_basis(config));
}

TrajectoryBatch load_demos(const std::string& path, const ScenarioConfig& config) {
  const auto dyn = build_dynamics(config);
  TrajectoryBatch batch = read_trajectory_file(path, dyn->state_dim(), dyn->action_dims());
  if (batch.front().horizon() != config.horizon) {
    throw IngestError("'" + path + "' has horizon " + std::to_string(batch.front().horizon()) +
                      ", config horizon is " + std::to_string(config.horizon));
  }
  return batch;
}

template <typename Fn>
int guarded(std::ostream& err, Fn&& fn) {
  try {
    return fn();
  } catch (const std::exception& e) {
    report(err, e);
    return kExitFailure;
  }
}

}  // namespace

int gen_demos(const GenDemosArgs& args, std::ostream& out, std::ostream& err) {
  if (args.trials < 1) {
    err << "usage error: --trials must be >= 1\n";
    return kExitUsage;
  }
  return guarded(err, [&] {
    const ScenarioConfig config = load_scenario(args.config);
    const GameSpec game = build_game(config, true_weights(config));
    const EceSolution sol = solve_ece(game, nullptr, config.solver);
    const TrajectoryBatch batch = PolicySampler(game, sol.policies).sample_batch(args.trials, args.seed);
    write_trajectory_file(args.out, batch);
    out << "wrote " << batch.size() << " trajectories of " << config.horizon << " steps to "
        << args.out << " (solver iterations: " << sol.trace.records.size() << ")\n";
    return kExitOk;
  });
}

int solve(const SolveArgs& args, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    ScenarioConfig config = load_scenario(args.config);
    if (args.strict_paper) config.solver.strict_paper = true;
    const WeightVector w =
        args.weights.empty() ? true_weights(config) : load_weights(args.weights, config);
    const GameSpec game = build_game(config, w);
    try {
      const EceSolution sol = solve_ece(game, nullptr, config.solver);
      if (!args.out_policy.empty()) write_text_file(args.out_policy, policy_to_json(sol.policies));
      write_trace_file(args.trace, sol.trace, game.num_agents());
      out << "converged after " << sol.trace.records.size() << " iterations\n";
      return kExitOk;
    } catch (const NonConvergenceError& e) {
      write_trace_file(args.trace, e.trace(), game.num_agents());
      report(err, e);
      return kExitFailure;
    } catch (const LineSearchError& e) {
      write_trace_file(args.trace, e.trace(), game.num_agents());
      report(err, e);
      return kExitFailure;
    }
  });
}

int sample(const SampleArgs& args, std::ostream& out, std::ostream& err) {
  if (args.trials < 1) {
    err << "usage error: --trials must be >= 1\n";
    return kExitUsage;
  }
  return guarded(err, [&] {
    const ScenarioConfig config = load_scenario(args.config);
    const WeightVector w = has_true_weights(config) ? true_weights(config) : initial_weights(config);
    const GameSpec game = build_game(config, w);
    const AffineGaussianPolicySet policies = policy_from_json(read_text_file(args.policy));
    policies.validate(game.state_dim(), game.action_dims());
    if (policies.horizon() != config.horizon) throw IngestError("policy horizon does not match config");
    const TrajectoryBatch batch = PolicySampler(game, policies).sample_batch(args.trials, args.seed);
    write_trajectory_file(args.out, batch);
    out << "wrote " << batch.size() << " trajectories to " << args.out << '\n';
    return kExitOk;
  });
}

int learn(const LearnArgs& args, std::ostream& out, std::ostream& err) {
  LearnConfig lc;
  ScenarioConfig config;
  try {
    config = load_scenario(args.config);
    lc = config.learner;
    if (args.mode) {
      if (*args.mode == "joint") {
        lc.mode = LearnMode::kJoint;
      } else if (*args.mode == "independent") {
        lc.mode = LearnMode::kIndependent;
      } else {
        err << "usage error: --mode must be joint or independent\n";
        return kExitUsage;
      }
    }
    if (args.learning_rate) lc.learning_rate = *args.learning_rate;
    if (args.samples) lc.samples = *args.samples;
    if (args.max_iterations) lc.max_iterations = *args.max_iterations;
    if (args.seed) lc.seed = *args.seed;
    lc.validate();
  } catch (const std::exception& e) {
    report(err, e);
    return kExitUsage;
  }
  return guarded(err, [&] {
    const TrajectoryBatch demos = load_demos(args.demos, config);
    const LearningProblem problem = build_problem(config);
    const LearnResult result = run_mairl(problem, demos, initial_weights(config), lc);
    if (!args.out_weights.empty()) {
      write_text_file(args.out_weights, weights_to_json(problem.basis, result.weights));
    }
    if (!args.trace.empty()) {
      std::ostringstream buf;
      write_learn_trace(buf, result.trace, problem.basis);
      write_text_file(args.trace, buf.str());
    }
    out << "mode: " << (lc.mode == LearnMode::kJoint ? "joint" : "independent") << '\n';
    out << "iterations: " << result.iterations << '\n';
    out << "converged: " << (result.converged ? "yes" : "no") << '\n';
    for (std::size_t i = 0; i < result.residuals.size(); ++i) {
      out << "agent " << (i + 1) << " residual: " << format_double(result.residuals[i]) << '\n';
    }
    return kExitOk;
  });
}

int eval(const EvalArgs& args, std::ostream& out, std::ostream& err) {
  if (args.weights.empty() == args.model_demos.empty()) {
    err << "usage error: give exactly one of --weights and --model-demos\n";
    return kExitUsage;
  }
  if (args.trials < 1) {
    err << "usage error: --trials must be >= 1\n";
    return kExitUsage;
  }
  return guarded(err, [&] {
    const ScenarioConfig config = load_scenario(args.config);
    const FeatureBasis basis = build_basis(config);
    const TrajectoryBatch demos = load_demos(args.demos, config);
    TrajectoryBatch model;
    if (!args.model_demos.empty()) {
      model = load_demos(args.model_demos, config);
    } else {
      const GameSpec game = build_game(config, load_weights(args.weights, config));
      const EceSolution sol = solve_ece(game, nullptr, config.solver);
      model = PolicySampler(game, sol.policies).sample_batch(args.trials, args.seed);
    }

    std::filesystem::create_directories(args.out);
    const std::filesystem::path dir(args.out);
    const auto kl = kl_divergence_per_feature(demos, model, basis, config.histogram);
    std::ostringstream kl_buf;
    write_kl_table(kl_buf, kl, basis);
    write_text_file((dir / "kl.csv").string(), kl_buf.str());

    std::ostringstream goal_buf;
    bool have_goals = true;
    for (const auto& a : config.agents) have_goals = have_goals && a.goal.size() > 0;
    write_goal_distance_table(goal_buf, have_goals ? goal_distance_stats(model, basis, goals(config))
                                                   : std::vector<DistanceStats>{});
    write_text_file((dir / "goal_distance.csv").string(), goal_buf.str());

    std::ostringstream rmse_buf;
    write_rmse_table(rmse_buf, trajectory_rmse(mean_trajectory(demos), model, basis, config.horizon));
    write_text_file((dir / "rmse.csv").string(), rmse_buf.str());

    out << kl_buf.str();
    return kExitOk;
  });
}

int validate(const ValidateArgs& args, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const ScenarioConfig config = load_scenario(args.config);
    const TrajectoryBatch batch = load_demos(args.file, config);
    out << "ok: " << batch.size() << " trials, " << batch.front().horizon() << " steps\n";
    return kExitOk;
  });
}

}  // namespace ece::cli
