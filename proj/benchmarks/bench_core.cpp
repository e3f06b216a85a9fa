#include <benchmark/benchmark.h>

#include "acbandit/actor.hpp"
#include "acbandit/critic.hpp"
#include "acbandit/harness.hpp"
#include "acbandit/rng.hpp"

using namespace acb;

namespace {

ActorObjective make_objective(Index n) {
  Rng rng(1);
  ActorObjective obj(4);
  Vec g(4);
  for (Index i = 0; i < n; ++i) {
    g << 1.0, rng.gauss(), rng.gauss(), rng.gauss();
    obj.add(g, rng.gauss(), rng.gauss());
  }
  return obj;
}

void ObjectiveValue(benchmark::State& state) {
  const ActorObjective obj = make_objective(state.range(0));
  const Vec theta = (Vec(4) << 0.4, 0.3, 0.3, 0.0).finished();
  for (auto _ : state) {
    benchmark::DoNotOptimize(obj.value(theta, 0.05));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(ObjectiveValue)->Arg(200)->Arg(1000)->Arg(5000)->Arg(90000);

void ObjectiveMaximize(benchmark::State& state) {
  const ActorObjective obj = make_objective(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(maximize_over(obj, 4, 0.05, SearchOptions{}));
  }
}
BENCHMARK(ObjectiveMaximize)->Arg(200)->Arg(1000)->Unit(benchmark::kMillisecond);

void CriticUpdate(benchmark::State& state) {
  Rng rng(2);
  Critic critic(8, 1.0);
  Vec f(8);
  for (auto _ : state) {
    for (Index i = 0; i < 8; ++i) f(i) = rng.gauss();
    critic.update(f, rng.gauss());
  }
}
BENCHMARK(CriticUpdate);

void Trajectory(benchmark::State& state) {
  const EnvSpec spec{EnvKind::iid};
  RunConfig cfg;
  cfg.T = static_cast<int>(state.range(0));
  cfg.burn_in = 20;
  cfg.clip = false;
  cfg.seed = 3;
  for (auto _ : state) {
    Rng rng(state.iterations());
    benchmark::DoNotOptimize(run_trajectory(spec, cfg, rng));
  }
}
BENCHMARK(Trajectory)->Arg(200)->Arg(500)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
