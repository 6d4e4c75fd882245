#include <benchmark/benchmark.h>

#include "gsf/harmonics.hpp"

using namespace gsf;

namespace {

void BM_HarmonicBasis(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const int k = static_cast<int>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(harmonic_basis(n, k));
  state.counters["dim"] = static_cast<double>(harmonic_dimension(n, k));
}
BENCHMARK(BM_HarmonicBasis)->Args({2, 6})->Args({3, 3})->Args({3, 6})->Args({4, 4})->Args({5, 3});

void BM_OscillatorSpectrum(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(oscillator_spectrum(3, 1.0, static_cast<int>(state.range(0))));
}
BENCHMARK(BM_OscillatorSpectrum)->Arg(2)->Arg(4);

}  // namespace

BENCHMARK_MAIN();
