// Serial vs parallel timings for the OpenMP kernels.
#include <benchmark/benchmark.h>

#include <cmath>

#include "ragq/baselines.hpp"
#include "ragq/data_model.hpp"
#include "ragq/gbt.hpp"
#include "ragq/pso.hpp"
#include "ragq/rng.hpp"
#include "ragq/vmd.hpp"

using namespace ragq;

namespace {

Exec exec_arg(const benchmark::State& state) { return state.range(0) == 0 ? Exec::serial : Exec::parallel; }

void label(benchmark::State& state) { state.SetLabel(state.range(0) == 0 ? "serial" : "parallel"); }

std::vector<double> noise_signal(std::size_t n) {
  Rng rng(1);
  std::vector<double> s(n);
  for (std::size_t i = 0; i < n; ++i) s[i] = std::sin(0.07 * static_cast<double>(i)) + 0.3 * rng.normal();
  return s;
}

const Dataset& table() {
  static const Dataset ds = standardize(synthesize(2000, 3)).first;
  return ds;
}

void BM_vmd_decompose(benchmark::State& state) {
  const auto s = noise_signal(static_cast<std::size_t>(state.range(1)));
  VmdConfig cfg;
  cfg.max_iterations = 100;
  for (auto _ : state) benchmark::DoNotOptimize(decompose(s, cfg, exec_arg(state)));
  label(state);
}

void BM_expand_features(benchmark::State& state) {
  VmdConfig cfg;
  cfg.max_iterations = 50;
  for (auto _ : state) benchmark::DoNotOptimize(expand_features(table(), cfg, exec_arg(state)));
  label(state);
}

void BM_gbt_fit(benchmark::State& state) {
  GbtConfig cfg;
  cfg.n_rounds = 20;
  for (auto _ : state)
    benchmark::DoNotOptimize(gbt_fit(table().features(), table().target(), cfg, exec_arg(state)));
  label(state);
}

void BM_extra_trees_fit(benchmark::State& state) {
  BaselineConfig cfg = BaselineConfig::defaults(BaselineKind::extra_trees, 1);
  cfg.n_estimators = 32;
  for (auto _ : state)
    benchmark::DoNotOptimize(baseline_fit(table().features(), table().target(), cfg, exec_arg(state)));
  label(state);
}

void BM_knn_predict(benchmark::State& state) {
  KnnRegressor model(5, exec_arg(state));
  model.fit(table().features(), table().target());
  for (auto _ : state) benchmark::DoNotOptimize(model.predict(table().features()));
  label(state);
}

void BM_pso_fitness(benchmark::State& state) {
  SearchSpace space{std::vector<double>(4, -2.0), std::vector<double>(4, 2.0), {}};
  SwarmConfig cfg;
  cfg.population = 16;
  cfg.iterations = 4;
  const auto costly = [](std::span<const double> x, std::uint64_t) {
    double acc = 0.0;
    for (int i = 0; i < 20000; ++i) acc += std::sin(x[0] * i) * std::cos(x[1] + i);
    return -std::abs(acc) - x[2] * x[2] - x[3] * x[3];
  };
  for (auto _ : state) benchmark::DoNotOptimize(optimize(space, costly, cfg, 1, exec_arg(state)));
  label(state);
}

}  // namespace

BENCHMARK(BM_vmd_decompose)->Args({0, 4096})->Args({1, 4096})->Args({0, 32768})->Args({1, 32768})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_expand_features)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_gbt_fit)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_extra_trees_fit)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_knn_predict)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_pso_fitness)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
