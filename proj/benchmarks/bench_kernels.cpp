#include <benchmark/benchmark.h>

#include <random>

#include "polarfft/material.hpp"
#include "polarfft/microstructure.hpp"
#include "polarfft/plasticity.hpp"
#include "polarfft/solver.hpp"
#include "polarfft/spectral.hpp"

using namespace polarfft;

namespace {

std::vector<Tensor2> random_field(std::size_t n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  std::vector<Tensor2> f(n);
  for (auto& t : f)
    for (auto& x : t.v) x = d(rng);
  return f;
}

void BM_RadialReturn(benchmark::State& state) {
  const PhaseParams p = presets::table1()[0];
  const auto e = random_field(64, 1), g = random_field(64, 2);
  std::size_t i = 0;
  for (auto _ : state) {
    const PointState s = radial_return(p, e[i % 64], g[(i + 7) % 64], PointState{});
    benchmark::DoNotOptimize(s);
    ++i;
  }
}
BENCHMARK(BM_RadialReturn);

void BM_FftRoundTrip(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const FrequencyGrid grid({n, n, n}, {1.0, 1.0, 1.0});
  const FftPlan plan(grid);
  auto field = random_field(grid.voxels(), 3);
  std::vector<ComplexTensor2> spec;
  for (auto _ : state) {
    plan.forward(field, spec);
    plan.inverse(spec, field);
    benchmark::DoNotOptimize(field.data());
  }
  state.SetComplexityN(static_cast<benchmark::IterationCount>(grid.voxels()));
}
BENCHMARK(BM_FftRoundTrip)->RangeMultiplier(2)->Range(4, 32)->Complexity(benchmark::oNLogN);

void BM_ApplyGreens(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const Laminate lam = gen_laminate({n, n, n}, 0.5, 1);
  const Stiffness c0 = reference_medium(lam.grid, presets::table4());
  const FrequencyGrid grid({n, n, n}, {1.0, 1.0, 1.0});
  const GreensCache cache = build_greens_cache(c0.A, c0.B, grid);
  const FftPlan plan(grid);
  std::vector<ComplexTensor2> tau, mu, e, g;
  plan.forward(random_field(grid.voxels(), 4), tau);
  plan.forward(random_field(grid.voxels(), 5), mu);
  for (auto _ : state) {
    apply_greens(cache, tau, mu, e, g);
    benchmark::DoNotOptimize(e.data());
  }
  state.SetComplexityN(static_cast<benchmark::IterationCount>(grid.voxels()));
}
BENCHMARK(BM_ApplyGreens)->RangeMultiplier(2)->Range(4, 32)->Complexity(benchmark::oN);

void BM_SolverStep(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const Laminate lam = gen_laminate({n, n, n}, 0.5, 1);
  const Solver solver(lam.grid, presets::table4(), {1e-5, ErrorKind::Local, 10000});
  Tensor2 E, G;
  E(0, 2) = 1.0;
  G(2, 1) = 1.0;
  const LoadingPath path = LoadingPath::constant_rate(E, G, 0.01, 1);
  for (auto _ : state) {
    FieldState s = solver.initial_state();
    const StepReport r = solver.step(s, path, 1);
    benchmark::DoNotOptimize(r);
  }
  state.SetComplexityN(static_cast<benchmark::IterationCount>(lam.grid.voxels()));
}
BENCHMARK(BM_SolverStep)->RangeMultiplier(2)->Range(4, 32)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
