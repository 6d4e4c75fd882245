#include <benchmark/benchmark.h>

#include <cmath>

#include "gsf/quadrature.hpp"

using namespace gsf;

namespace {

void BM_RadialGaussian(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  RadialIntegrand f{[](double r) { return std::exp(-r * r); }, 2.0, n, {}};
  for (auto _ : state) benchmark::DoNotOptimize(radial_integral(f));
}
BENCHMARK(BM_RadialGaussian)->Arg(1)->Arg(3)->Arg(8);

void BM_SpaceAnisotropic(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  SpaceIntegrand f{[](Point x) { return (1.0 + x[0] * x[0]) * std::exp(-norm_sq(x)); }, n, false, {}, 0};
  for (auto _ : state) benchmark::DoNotOptimize(space_integral(f));
}
BENCHMARK(BM_SpaceAnisotropic)->Arg(2)->Arg(3)->Unit(benchmark::kMillisecond);

void BM_TensorGrid(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  for (auto _ : state)
    benchmark::DoNotOptimize(tensor_grid_integral([](Point x) { return std::exp(-norm_sq(x)); }, 3, 6.0, m));
  state.SetItemsProcessed(state.iterations() * static_cast<long long>(m) * m * m);
}
BENCHMARK(BM_TensorGrid)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
