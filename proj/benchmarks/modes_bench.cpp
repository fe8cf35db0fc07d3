#include <benchmark/benchmark.h>

#include "treehash/treehash.hpp"

using namespace treehash;

namespace {

constexpr std::size_t kMessageBytes = 1 << 22;

const std::vector<std::uint8_t>& message() {
  static const std::vector<std::uint8_t> m = [] {
    std::vector<std::uint8_t> v(kMessageBytes);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = static_cast<std::uint8_t>(i * 131);
    return v;
  }();
  return m;
}

ModeParams params_for(int index) {
  ModeParams p;
  p.mode = all_modes().at(static_cast<std::size_t>(index));
  return p;
}

void BM_Sequential(benchmark::State& state) {
  ModeParams p = params_for(static_cast<int>(state.range(0)));
  state.SetLabel(std::string(mode_name(p.mode)));
  for (auto _ : state) benchmark::DoNotOptimize(hash_sequential(message(), p));
  state.SetBytesProcessed(state.iterations() * kMessageBytes);
}
BENCHMARK(BM_Sequential)->DenseRange(0, 13)->Unit(benchmark::kMillisecond);

void BM_ParallelStored(benchmark::State& state) {
  ModeParams p;
  p.mode = Mode::M6S;
  auto workers = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(hash_parallel_stored(message(), p, workers));
  state.SetBytesProcessed(state.iterations() * kMessageBytes);
}
BENCHMARK(BM_ParallelStored)->RangeMultiplier(2)->Range(1, 8)->Unit(benchmark::kMillisecond)->UseRealTime();

void BM_ParallelStream(benchmark::State& state) {
  ModeParams p;
  p.mode = Mode::M6L;
  auto workers = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(hash_parallel_stream(message(), p, workers, 2));
  state.SetBytesProcessed(state.iterations() * kMessageBytes);
}
BENCHMARK(BM_ParallelStream)->RangeMultiplier(2)->Range(1, 8)->Unit(benchmark::kMillisecond)->UseRealTime();

void BM_IdealTime(benchmark::State& state) {
  ModeParams p;
  p.mode = Mode::M6L;
  Topology t = build_topology(AritySchedule(p), static_cast<std::uint64_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(ideal_time(t));
}
BENCHMARK(BM_IdealTime)->Arg(1 << 12)->Arg(1 << 20);

void BM_Makespan(benchmark::State& state) {
  ModeParams p;
  p.mode = Mode::M6S;
  Topology t = build_topology(AritySchedule(p), 1 << 16);
  for (auto _ : state) benchmark::DoNotOptimize(simulate_makespan(t, {}, static_cast<std::uint64_t>(state.range(0))));
}
BENCHMARK(BM_Makespan)->Arg(16)->Arg(1024);

}  // namespace
