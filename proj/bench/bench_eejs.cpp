// Serial against OpenMP execution of the two parallel kernels: the assignment
// search inside one snapshot, and whole Monte Carlo drops.

#include <benchmark/benchmark.h>

#include "mec/experiment.hpp"
#include "mec/upper_level.hpp"

namespace {

void BM_EejsSolve(benchmark::State& state, mec::Execution exec) {
  const auto servers = static_cast<std::size_t>(state.range(0));
  const auto s = mec::generate_scenario(42, 3, servers, 64);
  for (auto _ : state) {
    auto r = mec::eejs_solve(s, {}, exec);
    benchmark::DoNotOptimize(r.total_energy_j);
  }
  state.counters["assignments"] = static_cast<double>(servers * (servers - 1) * (servers - 2));
}

void BM_EejsSerial(benchmark::State& state) { BM_EejsSolve(state, mec::Execution::serial); }
void BM_EejsParallel(benchmark::State& state) { BM_EejsSolve(state, mec::Execution::parallel); }

void BM_Drops(benchmark::State& state) {
  mec::ExperimentConfig c;
  c.drops = static_cast<std::size_t>(state.range(0));
  c.servers = {3, 6, 9};
  c.strategies = {mec::Strategy::eejs, mec::Strategy::mdoa};
  for (auto _ : state) {
    auto rows = mec::run_experiment(c);
    benchmark::DoNotOptimize(rows.data());
  }
}

}  // namespace

BENCHMARK(BM_EejsSerial)->Arg(3)->Arg(6)->Arg(9)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_EejsParallel)->Arg(3)->Arg(6)->Arg(9)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_Drops)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
