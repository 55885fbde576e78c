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

#include <benchmark/benchmark.h>

#include <random>

#include "ece/config.hpp"
#include "ece/eval.hpp"
#include "ece/irl.hpp"
#include "ece/lq_ece.hpp"

namespace {

using namespace ece;

Mat random_mat(int r, int c, std::mt19937_64& rng) {
  std::normal_distribution<double> nd(0.0, 1.0);
  Mat m(r, c);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) m(i, j) = nd(rng);
  return m;
}

// Time-invariant N-agent game with n = 4 * N states and 2 controls each.
LqStageGame random_game(int N, int T) {
  std::mt19937_64 rng(N);
  const int n = 4 * N;
  const Mat A = Mat::Identity(n, n) + 0.05 * random_mat(n, n, rng);
  std::vector<Mat> B, Q;
  std::vector<Vec> l;
  std::vector<std::vector<Mat>> R(N);
  for (int i = 0; i < N; ++i) {
    B.push_back(0.3 * random_mat(n, 2, rng));
    const Mat X = random_mat(n, n, rng);
    Q.push_back(X * X.transpose() / n);
    l.push_back(random_mat(n, 1, rng));
    for (int j = 0; j < N; ++j) R[i].push_back(i == j ? Mat(Mat::Identity(2, 2)) : Mat(Mat::Zero(2, 2)));
  }
  return make_time_invariant_lq(A, B, Q, l, R, T);
}

void BM_SolveLqEce(benchmark::State& state) {
  const int N = static_cast<int>(state.range(0));
  const LqStageGame g = random_game(N, 50);
  const std::vector<double> temps(N, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(solve_lq_ece(g, temps));
}
BENCHMARK(BM_SolveLqEce)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMicrosecond);

void BM_SolveEceCrossing(benchmark::State& state) {
  const ScenarioConfig cfg = load_scenario(ECE_SCENARIO_DIR "/crossing.json");
  const GameSpec g = build_game(cfg, true_weights(cfg));
  for (auto _ : state) benchmark::DoNotOptimize(solve_ece(g, nullptr, cfg.solver));
}
BENCHMARK(BM_SolveEceCrossing)->Unit(benchmark::kMillisecond);

void BM_FeatureExpectation(benchmark::State& state) {
  const ScenarioConfig cfg = load_scenario(ECE_SCENARIO_DIR "/crossing.json");
  const LearningProblem p = build_problem(cfg);
  const WeightVector w = true_weights(cfg);
  const int samples = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(estimate_feature_expectation(p, w, samples, 1));
}
BENCHMARK(BM_FeatureExpectation)->Arg(50)->Arg(200)->Unit(benchmark::kMillisecond);

void BM_KlPerFeature(benchmark::State& state) {
  const ScenarioConfig cfg = load_scenario(ECE_SCENARIO_DIR "/crossing.json");
  const GameSpec g = build_game(cfg, true_weights(cfg));
  const EceSolution sol = solve_ece(g, nullptr, cfg.solver);
  const PolicySampler sampler(g, sol.policies);
  const TrajectoryBatch a = sampler.sample_batch(200, 0);
  const TrajectoryBatch b = sampler.sample_batch(200, 1000);
  const FeatureBasis basis = build_basis(cfg);
  for (auto _ : state) benchmark::DoNotOptimize(kl_divergence_per_feature(a, b, basis, cfg.histogram));
}
BENCHMARK(BM_KlPerFeature)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
