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

#include "ece/ilq_ece.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace ece {
namespace {

double max_state_deviation(const Trajectory& a, const Trajectory& b) {
  double dev = 0.0;
  for (std::size_t k = 0; k < a.states.size(); ++k) {
    dev = std::max(dev, (a.states[k] - b.states[k]).norm());
  }
  return dev;
}

}  // namespace

void SolverConfig::validate() const {
  if (max_iterations < 1) throw ConfigError("solver.max_iterations must be >= 1");
  if (!(convergence_tol > 0.0)) throw ConfigError("solver.convergence_tol must be > 0");
  if (!(line_search_threshold > 0.0)) {
    throw ConfigError("solver.line_search_threshold must be > 0");
  }
  if (!(min_step > 0.0) || min_step > 1.0) throw ConfigError("solver.min_step must be in (0, 1]");
  if (!(hessian_floor > 0.0)) throw ConfigError("solver.hessian_floor must be > 0");
}

Mat project_psd(const Mat& H, double floor) {
  Mat S = 0.5 * (H + H.transpose());
  if (S.size() == 0) return S;
  Eigen::LDLT<Mat> ldlt(S);
  if (ldlt.info() == Eigen::Success && ldlt.isPositive()) return S;
  Eigen::SelfAdjointEigenSolver<Mat> eig(S);
  Vec values = eig.eigenvalues();
  const double scale = std::max(1.0, values.cwiseAbs().maxCoeff());
  if (values.minCoeff() >= -1e-12 * scale) return S;
  for (Eigen::Index k = 0; k < values.size(); ++k) {
    if (values(k) < 0.0) values(k) = floor;
  }
  return eig.eigenvectors() * values.asDiagonal() * eig.eigenvectors().transpose();
}

std::vector<LinearStage> linearize(const GameSpec& game, const Trajectory& nominal) {
  const int T = game.horizon;
  if (nominal.horizon() != T) throw ShapeError("nominal horizon mismatch");
  std::vector<LinearStage> stages;
  stages.reserve(T > 0 ? T - 1 : 0);
  for (int k = 0; k + 1 < T; ++k) {
    LinearStage lin = game.dynamics->linearize(k + 1, nominal.states[k], nominal.actions[k]);
    bool finite = lin.A.allFinite();
    for (const auto& b : lin.B) finite = finite && b.allFinite();
    if (!finite) {
      throw ApproximationError("non-finite dynamics Jacobian at t=" + std::to_string(k + 1),
                               k + 1);
    }
    stages.push_back(std::move(lin));
  }
  return stages;
}

std::vector<std::vector<StateQuadratic>> quadratize(const GameSpec& game,
                                                    const Trajectory& nominal,
                                                    const SolverConfig& config) {
  const int T = game.horizon;
  const int N = game.num_agents();
  const auto dims = game.action_dims();
  if (nominal.horizon() != T) throw ShapeError("nominal horizon mismatch");
  std::vector<std::vector<StateQuadratic>> out(T);
  for (int k = 0; k < T; ++k) {
    const Vec& s = nominal.states[k];
    out[k].reserve(N);
    for (int i = 0; i < N; ++i) {
      const CostModel& cost = *game.costs[i];
      StateQuadratic q;
      const Mat H = cost.state_hessian(k + 1, s);
      q.l = cost.state_gradient(k + 1, s);
      if (!H.allFinite() || !q.l.allFinite()) {
        throw ApproximationError("non-finite cost derivatives for agent " +
                                     std::to_string(i) + " at t=" + std::to_string(k + 1),
                                 k + 1);
      }
      q.Q = project_psd(H, config.hessian_floor);
      const auto& R = cost.action_weights();
      for (int j = 0; j < N; ++j) {
        q.r.push_back(config.strict_paper ? Vec(Vec::Zero(dims[j]))
                                          : Vec(2.0 * R[j] * nominal.actions[k][j]));
      }
      out[k].push_back(std::move(q));
    }
  }
  return out;
}

LqStageGame approximate_lq(const GameSpec& game, const Trajectory& nominal,
                           const SolverConfig& config) {
  const int T = game.horizon;
  const int N = game.num_agents();
  LqStageGame lq;
  lq.state_dim = game.state_dim();
  lq.action_dims = game.action_dims();
  lq.R.resize(N);
  for (int i = 0; i < N; ++i) {
    for (const auto& Rij : game.costs[i]->action_weights()) lq.R[i].push_back(2.0 * Rij);
  }
  auto lin = linearize(game, nominal);
  auto quad = quadratize(game, nominal, config);
  lq.stages.resize(T);
  for (int k = 0; k < T; ++k) {
    LqStage& st = lq.stages[k];
    if (k + 1 < T) {
      st.A = std::move(lin[k].A);
      st.B = std::move(lin[k].B);
    }
    for (int i = 0; i < N; ++i) {
      st.Q.push_back(std::move(quad[k][i].Q));
      st.l.push_back(std::move(quad[k][i].l));
      st.r.push_back(std::move(quad[k][i].r));
    }
  }
  return lq;
}

EceSolution solve_ece(const GameSpec& game, const AffineGaussianPolicySet* init,
                      const SolverConfig& config) {
  game.validate();
  config.validate();
  const int T = game.horizon;
  const int N = game.num_agents();
  const Vec& s1 = game.initial_state.mean();
  const LqOptions lq_options{.strict_paper = config.strict_paper};

  AffineGaussianPolicySet policy =
      init ? *init : AffineGaussianPolicySet::zeros(game.state_dim(), game.action_dims(), T);
  policy.validate(game.state_dim(), game.action_dims());
  Trajectory nominal = simulate_mean(game, policy, s1);

  IterationTrace trace;
  for (int it = 1; it <= config.max_iterations; ++it) {
    const LqStageGame lq = approximate_lq(game, nominal, config);
    LqSolution sol = solve_lq_ece(lq, game.temperatures, lq_options);

    AffineGaussianPolicySet candidate;
    candidate.nominal_states = nominal.states;
    candidate.nominal_actions = nominal.actions;
    candidate.stages = sol.policies.stages;

    double step = 1.0;
    Trajectory next;
    double deviation = std::numeric_limits<double>::infinity();
    for (;;) {
      for (int k = 0; k < T; ++k) {
        for (int i = 0; i < N; ++i) {
          candidate.stages[k][i].offset = step * sol.policies.stages[k][i].offset;
        }
      }
      try {
        next = simulate_mean(game, candidate, s1);
        deviation = max_state_deviation(next, nominal);
      } catch (const DivergenceError&) {
        deviation = std::numeric_limits<double>::infinity();
      }
      if (deviation <= config.line_search_threshold) break;
      step *= 0.5;
      if (step < config.min_step) {
        throw LineSearchError("line search found no step within the deviation threshold at "
                              "iteration " + std::to_string(it),
                              std::move(trace));
      }
    }

    trace.records.push_back({it, deviation, step, evaluate_cost(game, nominal)});

    if (deviation < config.convergence_tol) {
      // Re-express the accepted policy around its own mean rollout.
      for (int k = 0; k < T; ++k) {
        for (int i = 0; i < N; ++i) candidate.stages[k][i].offset.setZero();
      }
      candidate.nominal_states = next.states;
      candidate.nominal_actions = next.actions;
      return {std::move(candidate), std::move(next), std::move(trace), std::move(sol.values)};
    }
    nominal = std::move(next);
  }
  throw NonConvergenceError("solver did not converge in " +
                                std::to_string(config.max_iterations) + " iterations",
                            std::move(trace));
}

}  // namespace ece
