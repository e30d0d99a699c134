#include <benchmark/benchmark.h>

#include "hsc/baselines.hpp"
#include "hsc/demand.hpp"
#include "hsc/env.hpp"
#include "hsc/network.hpp"
#include "hsc/ppo.hpp"

namespace {

hsc::NetworkInstance default_instance() {
  return hsc::generate_instance(hsc::NetworkConfig{});
}

hsc::DemandSeries default_series() {
  return hsc::generate_series(hsc::DemandParams{}, 100, 10);
}

void EnvStep(benchmark::State& state) {
  const auto instance = default_instance();
  const auto series = default_series();
  hsc::Environment env(instance, series);
  hsc::RandomStream rng(1);
  hsc::Action action = hsc::Action::zeros(15, 5);
  for (auto& b : action.centers) b = 1;
  for (auto& b : action.warehouses) b = 1;
  env.reset();
  for (auto _ : state) {
    if (env.done()) env.reset();
    auto out = env.step(action, rng);
    benchmark::DoNotOptimize(out);
  }
}
BENCHMARK(EnvStep);

void DemandGeneration(benchmark::State& state) {
  hsc::DemandParams params;
  for (auto _ : state) {
    auto series = hsc::generate_series(params, 100, 10);
    benchmark::DoNotOptimize(series);
  }
}
BENCHMARK(DemandGeneration);

void NondominatedSort(benchmark::State& state) {
  hsc::RandomStream rng(7);
  std::vector<hsc::ObjectivePoint> points(static_cast<std::size_t>(state.range(0)));
  for (auto& p : points) {
    p.efficiency = rng.uniform() * 1000.0;
    p.cost = rng.uniform() * 1000.0;
  }
  for (auto _ : state) {
    auto fronts = hsc::fast_nondominated_sort(points);
    benchmark::DoNotOptimize(fronts);
  }
}
BENCHMARK(NondominatedSort)->Arg(64)->Arg(200)->Arg(400);

void PolicyForward(benchmark::State& state) {
  hsc::RandomStream rng(3);
  auto params = hsc::PolicyParams::init(66, 20, 64, rng);
  hsc::Observation obs(66, 0.25);
  for (auto _ : state) {
    auto out = hsc::policy_forward(params, obs);
    benchmark::DoNotOptimize(out);
  }
}
BENCHMARK(PolicyForward);

void PpoUpdate(benchmark::State& state) {
  hsc::RandomStream rng(11);
  auto params = hsc::PolicyParams::init(66, 20, 64, rng);
  hsc::TrainConfig config;
  config.epochs_per_update = 1;

  hsc::TrajectoryBuffer buffer;
  buffer.episode_starts.push_back(0);
  for (int i = 0; i < 400; ++i) {
    hsc::Sample s;
    s.obs.resize(66);
    for (auto& v : s.obs) v = rng.uniform();
    const auto head = hsc::policy_forward(params, s.obs);
    const auto sampled = hsc::sample_action(head.logits, rng);
    s.bits = sampled.bits;
    s.old_log_prob = sampled.log_prob;
    s.advantage = rng.normal();
    s.ret = rng.normal();
    buffer.samples.push_back(std::move(s));
  }
  hsc::normalize_advantages(buffer);

  for (auto _ : state) {
    auto working = params;
    hsc::AdamOptimizer adam;
    hsc::RandomStream shuffle(5);
    hsc::ppo_update(working, adam, buffer, config, shuffle);
    benchmark::DoNotOptimize(working);
  }
}
BENCHMARK(PpoUpdate);

}  // namespace

BENCHMARK_MAIN();
