#include <benchmark/benchmark.h>

#include "betasplit/parallel.hpp"

using namespace betasplit;

namespace {

const ModelParams kParams{0.5, -0.5, 0.2, 1.0, 8};

void BM_ReplicatesSerial(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(sample_replicates_serial(kParams, 1, state.range(0), Process::discrete));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_ReplicatesParallel(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(sample_replicates(kParams, 1, state.range(0), Process::discrete));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_ContinuousSerial(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(sample_replicates_serial(kParams, 1, state.range(0), Process::continuous));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_ContinuousParallel(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(sample_replicates(kParams, 1, state.range(0), Process::continuous));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_ExactSerial(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(exact_distribution(static_cast<int>(state.range(0)), {0.5, -0.5}, Resolution::shape));
  }
}

void BM_ExactParallel(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        exact_distribution_parallel(static_cast<int>(state.range(0)), {0.5, -0.5}, Resolution::shape));
  }
}

}  // namespace

BENCHMARK(BM_ReplicatesSerial)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ReplicatesParallel)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ContinuousSerial)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ContinuousParallel)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ExactSerial)->Arg(6)->Arg(8)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ExactParallel)->Arg(6)->Arg(8)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
