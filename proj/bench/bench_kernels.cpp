#include <benchmark/benchmark.h>

#include "entkit/fuzz.hpp"
#include "entkit/gen.hpp"
#include "entkit/metrics.hpp"

namespace {

using namespace entkit;

FinDist grid_uniform(int side) {
  const GroupContext ctx = GroupContext::z_lattice(2);
  std::vector<CoordVec> pts;
  for (Coord x = 0; x < side; ++x) {
    for (Coord y = 0; y < side; ++y) pts.push_back({x, y});
  }
  return FinDist::uniform_on(ctx, pts);
}

void bm_convolve_serial(benchmark::State& state) {
  const FinDist p = grid_uniform(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(convolve_serial(p, p, -1));
  }
}

void bm_convolve_omp(benchmark::State& state) {
  const FinDist p = grid_uniform(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(convolve(p, p, -1));
  }
}

void bm_energy_serial(benchmark::State& state) {
  const GroupContext ctx = GroupContext::z_lattice(2);
  TrialRng rng(12, 0);
  const auto a = sample_set(rng, ctx, static_cast<int>(state.range(0)),
                            static_cast<int>(state.range(0)), 64);
  for (auto _ : state) {
    benchmark::DoNotOptimize(energy_serial(ctx, a));
  }
}

void bm_energy_omp(benchmark::State& state) {
  const GroupContext ctx = GroupContext::z_lattice(2);
  TrialRng rng(12, 0);
  const auto a = sample_set(rng, ctx, static_cast<int>(state.range(0)),
                            static_cast<int>(state.range(0)), 64);
  for (auto _ : state) {
    benchmark::DoNotOptimize(energy(ctx, a));
  }
}

void bm_fuzz_threads(benchmark::State& state) {
  FuzzConfig cfg;
  cfg.seed = 5;
  cfg.trials = 64;
  cfg.threads = static_cast<int>(state.range(0));
  cfg.selected = {"ruzsa-triangle", "renyi-monotone", "set-sandwich"};
  for (auto _ : state) {
    benchmark::DoNotOptimize(run_fuzz(cfg));
  }
}

}  // namespace

BENCHMARK(bm_convolve_serial)->Arg(24)->Arg(48)->Unit(benchmark::kMillisecond);
BENCHMARK(bm_convolve_omp)->Arg(24)->Arg(48)->Unit(benchmark::kMillisecond);
BENCHMARK(bm_energy_serial)->Arg(512)->Arg(1024)->Unit(benchmark::kMillisecond);
BENCHMARK(bm_energy_omp)->Arg(512)->Arg(1024)->Unit(benchmark::kMillisecond);
BENCHMARK(bm_fuzz_threads)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
