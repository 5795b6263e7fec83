#include <benchmark/benchmark.h>

#include "hallfiber/dispersion.hpp"
#include "hallfiber/fiber_schrodinger.hpp"
#include "hallfiber/spectral_core.hpp"

using namespace hallfiber;

namespace {

RobinSystem robin_system(std::int64_t nodes) {
  return assemble_robin({FormSign::minus, 1.0, 1.0, 0.0}, make_grid(20.0, static_cast<std::size_t>(nodes)));
}

void bm_sturm_count(benchmark::State& state) {
  const RobinSystem sys = robin_system(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(sturm_count(sys.reduced, 3.0));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(bm_sturm_count)->RangeMultiplier(4)->Range(1 << 10, 1 << 14)->Complexity();

void bm_kth_eigenpair(benchmark::State& state) {
  const RobinSystem sys = robin_system(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(kth_eigenpair(sys.reduced, 2).value);
}
BENCHMARK(bm_kth_eigenpair)->RangeMultiplier(4)->Range(1 << 10, 1 << 14);

void bm_theta(benchmark::State& state) {
  const FiberParams fp{1.0, 1.0, 0.5};
  const Branch br{BranchSign::minus, static_cast<int>(state.range(0))};
  const Grid g = grid_for(fp, br.n);
  for (auto _ : state) benchmark::DoNotOptimize(theta(br, fp, g));
}
BENCHMARK(bm_theta)->DenseRange(1, 3);

void bm_sweep(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(sweep(1.0, 1.0, -4.0, 4.0, 17, branches_up_to(2)));
  }
}
BENCHMARK(bm_sweep)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
