// Serial reference kernels against their OpenMP counterparts.
// The threaded variants take the thread count as the benchmark argument.

#include <benchmark/benchmark.h>

#include <random>

#include "safs/autoencoder.hpp"
#include "safs/forest.hpp"
#include "safs/pipeline.hpp"
#include "safs/serial.hpp"
#include "safs/synth.hpp"

namespace {

using namespace safs;

struct Regression {
  Matrix x;
  std::vector<double> y;
};

const Regression& regression() {
  static const Regression data = [] {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Regression r{Matrix(400, 30), std::vector<double>(400)};
    for (std::size_t i = 0; i < 400; ++i) {
      for (std::size_t j = 0; j < 30; ++j) r.x(i, j) = u(rng);
      r.y[i] = 3 * r.x(i, 0) - 2 * r.x(i, 4) + r.x(i, 7) * r.x(i, 9) + 0.1 * u(rng);
    }
    return r;
  }();
  return data;
}

ForestParams forest_params() {
  ForestParams p;
  p.n_trees = 64;
  p.seed = 3;
  return p;
}

const StackedAutoencoder& trained_sae() {
  static const StackedAutoencoder sae = [] {
    TrainConfig cfg;
    cfg.epochs = 5;
    return train_stacked(regression().x, Architecture(30, 12), cfg);
  }();
  return sae;
}

const Dataset& sweep_dataset() {
  static const Dataset d = [] {
    SynthSpec spec;
    spec.m = 150;
    spec.p_cont = 12;
    spec.k_relevant = 3;
    spec.seed = 2;
    const auto s = generate_synth(spec);
    CsvOptions options;
    options.schema = parse_schema(s.schema);
    return parse_csv(s.csv, options);
  }();
  return d;
}

PipelineConfig sweep_config(int threads) {
  PipelineConfig cfg;
  cfg.n_grid = {2, 4, 6, 8};
  cfg.n_trees = {20};
  cfg.cv_folds = 3;
  cfg.repeats = 1;
  cfg.train.epochs = 20;
  cfg.threads = threads;
  return cfg;
}

void BM_ForestFitSerial(benchmark::State& state) {
  const auto& d = regression();
  for (auto _ : state) benchmark::DoNotOptimize(serial::fit_random_forest(d.x, d.y, forest_params()));
}

void BM_ForestFitParallel(benchmark::State& state) {
  const auto& d = regression();
  const int threads = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(fit_random_forest(d.x, d.y, forest_params(), threads));
}

void BM_ForestPredictSerial(benchmark::State& state) {
  const auto& d = regression();
  const auto forest = fit_random_forest(d.x, d.y, forest_params());
  for (auto _ : state) benchmark::DoNotOptimize(serial::rf_predict(forest, d.x));
}

void BM_ForestPredictParallel(benchmark::State& state) {
  const auto& d = regression();
  const auto forest = fit_random_forest(d.x, d.y, forest_params());
  const int threads = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(rf_predict(forest, d.x, threads));
}

void BM_RepresentSerial(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(serial::represent(trained_sae(), regression().x));
}

void BM_RepresentParallel(benchmark::State& state) {
  const int threads = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(represent(trained_sae(), regression().x, threads));
}

void BM_SweepSerial(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(serial::sweep(sweep_dataset(), sweep_config(1)));
}

// run_safs adds one ranking fit on top of the sweep; Arg(1) shows that overhead.
void BM_SweepParallel(benchmark::State& state) {
  const auto cfg = sweep_config(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(run_safs(sweep_dataset(), cfg, false));
}

}  // namespace

BENCHMARK(BM_ForestFitSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ForestFitParallel)->Arg(1)->Arg(2)->Arg(4)->UseRealTime()->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ForestPredictSerial)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_ForestPredictParallel)->Arg(1)->Arg(2)->Arg(4)->UseRealTime()->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_RepresentSerial)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_RepresentParallel)->Arg(1)->Arg(2)->Arg(4)->UseRealTime()->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_SweepSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SweepParallel)->Arg(1)->Arg(2)->Arg(4)->UseRealTime()->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
