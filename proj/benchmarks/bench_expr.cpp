#include <benchmark/benchmark.h>

#include "gsf/expr.hpp"

using namespace gsf;

namespace {

const Vec kPoint{0.3, -0.7, 1.1};

void BM_Parse(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(parse("0.5*r^2 + sin(x1)*exp(-x2^2) + log(1 + x3^2)", 3));
}
BENCHMARK(BM_Parse);

void BM_EvalValue(benchmark::State& state) {
  const Expr e = parse("0.5*r^2 + sin(x1)*exp(-x2^2) + log(1 + x3^2)", 3);
  for (auto _ : state) benchmark::DoNotOptimize(eval_u(e, kPoint));
}
BENCHMARK(BM_EvalValue);

void BM_EvalSecondOrder(benchmark::State& state) {
  const Expr e = parse("0.5*r^2 + sin(x1)*exp(-x2^2) + log(1 + x3^2)", 3);
  for (auto _ : state) benchmark::DoNotOptimize(laplacian_u(e, kPoint));
}
BENCHMARK(BM_EvalSecondOrder);

}  // namespace

BENCHMARK_MAIN();
