#include <benchmark/benchmark.h>

#include <random>

#include "esrl/cem.hpp"
#include "esrl/envs.hpp"
#include "esrl/policy.hpp"
#include "esrl/rollout.hpp"

namespace {

using namespace esrl;

EsPolicyParams block_policy() {
  PolicyArchitecture a;
  a.goal = Block2dConfig{}.goal();
  std::mt19937_64 rng(0);
  return initialize_policy(a, rng);
}

void BM_FicnnEval(benchmark::State& state) {
  const EsPolicyParams p = block_policy();
  const Vec x{{0.1, -0.2}};
  for (auto _ : state) benchmark::DoNotOptimize(ficnn_eval(p.potential.ficnn, x));
}
BENCHMARK(BM_FicnnEval);

void BM_FicnnEvalWithGrad(benchmark::State& state) {
  const EsPolicyParams p = block_policy();
  const Vec x{{0.1, -0.2}};
  Vec g;
  for (auto _ : state) benchmark::DoNotOptimize(ficnn_eval_with_grad(p.potential.ficnn, x, g));
}
BENCHMARK(BM_FicnnEvalWithGrad);

void BM_DampingMatrix(benchmark::State& state) {
  const EsPolicyParams p = block_policy();
  const Vec v{{0.3, 0.1}};
  for (auto _ : state) benchmark::DoNotOptimize(damping_matrix(p.damping, v));
}
BENCHMARK(BM_DampingMatrix);

void BM_PolicyAction(benchmark::State& state) {
  const EsPolicyParams p = block_policy();
  const Vec x{{-0.1, 0.02}}, v{{0.3, 0.1}};
  for (auto _ : state) benchmark::DoNotOptimize(policy_action(p, x, v));
}
BENCHMARK(BM_PolicyAction);

void BM_BlockStep(benchmark::State& state) {
  const Block2dEnv env(Block2dConfig{});
  SimState s = env.initial_state();
  const Vec u{{1.0, 0.5}};
  for (auto _ : state) benchmark::DoNotOptimize(env.step(s, u));
}
BENCHMARK(BM_BlockStep);

void BM_BlockEpisode(benchmark::State& state) {
  const Block2dEnv env(Block2dConfig{});
  const EsPolicyParams p = block_policy();
  for (auto _ : state) benchmark::DoNotOptimize(run_episode(p, env, 200, RewardConfig{}));
}
BENCHMARK(BM_BlockEpisode)->Unit(benchmark::kMillisecond);

void BM_CemIteration(benchmark::State& state) {
  const Block2dEnv env(Block2dConfig{});
  PolicyArchitecture a;
  a.goal = env.goal();
  const FlatLayout layout = FlatLayout::make(a);
  const Objective f = [&](const Vec& th) {
    const EpisodeResult r = run_episode(unflatten(layout, th), env, 200, RewardConfig{});
    return Evaluation{r.total_reward, r.success};
  };
  const CemDistribution init{flatten(block_policy(), layout).values,
                             Vec::Constant(layout.total, 0.2)};
  CemConfig cfg;
  cfg.n_iterations = 1;
  for (auto _ : state) benchmark::DoNotOptimize(optimize(f, init, cfg));
}
BENCHMARK(BM_CemIteration)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
