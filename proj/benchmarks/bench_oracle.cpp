#include <benchmark/benchmark.h>

#include "gsf/expr.hpp"
#include "gsf/oracle.hpp"
#include "gsf/verify.hpp"

using namespace gsf;

namespace {

PotentialFunction oscillator(int n) { return PotentialFunction::from_expression(parse("r^2", n)); }

void BM_GridEigenpair(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const int m = static_cast<int>(state.range(1));
  const DiscreteOperator op = discretize(oscillator(n), Grid(n, 8.0, m));
  for (auto _ : state) benchmark::DoNotOptimize(smallest_eigenpair(op, 1e-8, 100000));
}
BENCHMARK(BM_GridEigenpair)->Args({1, 400})->Args({2, 100})->Args({2, 200})->Unit(benchmark::kMillisecond);

void BM_RadialOracle(benchmark::State& state) {
  const PotentialFunction v = PotentialFunction::from_expression(parse("-1/r", 3));
  const VectorField hint = RadialPowerField{0.5, 1.0, 3};
  const CheckOptions opts;
  for (auto _ : state) benchmark::DoNotOptimize(oracle_energy(v, &hint, opts));
}
BENCHMARK(BM_RadialOracle)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
