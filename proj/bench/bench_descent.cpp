// Serial reference kernels against their OpenMP/reduced counterparts.

#include <benchmark/benchmark.h>

#include "twodescent/descent.hpp"
#include "twodescent/families.hpp"

using namespace twodescent;

namespace {

// Insoluble torsor (obstructed mod 5), so the search exhausts the box.
const descent::TorsorProblem kHard{5, 0, -7};

void BM_GlobalSearchSerial(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(descent::global_search_serial(kHard, state.range(0)));
}
BENCHMARK(BM_GlobalSearchSerial)->Arg(128)->Arg(512)->Arg(1024)->Unit(benchmark::kMillisecond);

void BM_GlobalSearchParallel(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(descent::global_search(kHard, state.range(0)));
}
BENCHMARK(BM_GlobalSearchParallel)->Arg(128)->Arg(512)->Arg(1024)->Unit(benchmark::kMillisecond);

void BM_LocalObstructionReference(benchmark::State& state) {
  const descent::TorsorProblem t{14, 0, 10};
  for (auto _ : state) benchmark::DoNotOptimize(descent::local_obstruction_reference(t, state.range(0)));
}
BENCHMARK(BM_LocalObstructionReference)->Arg(16)->Arg(25)->Arg(49);

void BM_LocalObstruction(benchmark::State& state) {
  const descent::TorsorProblem t{14, 0, 10};
  for (auto _ : state) benchmark::DoNotOptimize(descent::local_obstruction(t, state.range(0)));
}
BENCHMARK(BM_LocalObstruction)->Arg(16)->Arg(25)->Arg(49);

void BM_RankInterval(benchmark::State& state) {
  for (auto _ : state)
    benchmark::DoNotOptimize(rankbound::rank_interval(families::family_curve(state.range(0))));
}
BENCHMARK(BM_RankInterval)->Arg(7)->Arg(5827)->Arg(431)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
