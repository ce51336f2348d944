#include <benchmark/benchmark.h>

#include "treegibbs/nystrom.hpp"
#include "treegibbs/reduction.hpp"

using namespace treegibbs;

namespace {

DegenerateKernel affine() {
  return DegenerateKernel::build(expr::parse("1"), expr::parse("t"), expr::parse("1"), expr::parse("v"));
}

void BM_GaussLegendre(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(QuadratureRule::gauss_legendre(static_cast<int>(state.range(0))));
}
BENCHMARK(BM_GaussLegendre)->Arg(32)->Arg(64)->Arg(512);

void BM_Evaluate(benchmark::State& state) {
  auto ast = expr::parse("exp(-2*t) * sin(3*u) + sqrt(1 + v^2) / (2 + cos(t*u*v))");
  expr::Bindings b{{expr::Var::t, 0.3}, {expr::Var::u, 0.6}, {expr::Var::v, 0.9}};
  for (auto _ : state) benchmark::DoNotOptimize(expr::evaluate(ast, b));
}
BENCHMARK(BM_Evaluate);

void BM_ComputeCoefficients(benchmark::State& state) {
  auto k = affine();
  auto rule = QuadratureRule::gauss_legendre(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(compute_coefficients(k, rule));
}
BENCHMARK(BM_ComputeCoefficients)->Arg(64)->Arg(256);

void BM_ClassifyAndRoots(benchmark::State& state) {
  CubicPolynomial c{1.0, -4.5, 6.0, 2.2};
  for (auto _ : state) {
    benchmark::DoNotOptimize(classify(c));
    benchmark::DoNotOptimize(positive_roots(c));
  }
}
BENCHMARK(BM_ClassifyAndRoots);

void BM_ApplyL(benchmark::State& state) {
  auto rule = QuadratureRule::gauss_legendre(static_cast<int>(state.range(0)));
  DiscreteOperator op(affine(), rule);
  auto f = GridFunction::constant(rule, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(op.apply_L(f));
}
BENCHMARK(BM_ApplyL)->Arg(32)->Arg(64)->Arg(128);

void BM_Multistart(benchmark::State& state) {
  auto rule = QuadratureRule::gauss_legendre(32);
  MultistartOptions opts;
  opts.n_starts = 16;
  for (auto _ : state) benchmark::DoNotOptimize(multistart_solve(Kernel{affine()}, rule, opts));
}
BENCHMARK(BM_Multistart)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
