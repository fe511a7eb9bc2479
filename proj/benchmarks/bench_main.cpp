#include <benchmark/benchmark.h>

#include "gpmisspec/designs.hpp"
#include "gpmisspec/gram.hpp"
#include "gpmisspec/kernels.hpp"
#include "gpmisspec/mle.hpp"
#include "gpmisspec/specfun.hpp"

using namespace gpmisspec;

static void BM_BesselK(benchmark::State& state) {
  const double nu = state.range(0) / 10.0;
  double z = 0.01;
  for (auto _ : state) {
    benchmark::DoNotOptimize(bessel_k(nu, z));
    z = z < 20 ? z * 1.1 : 0.01;
  }
}
BENCHMARK(BM_BesselK)->Arg(3)->Arg(15)->Arg(27);

static void BM_AssembleGram(benchmark::State& state) {
  const auto k = KernelHandle::matern({1.5, 1, 1}, 1);
  const Design d = gen_grid(1, state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(assemble_gram(k, d));
}
BENCHMARK(BM_AssembleGram)->RangeMultiplier(4)->Range(64, 1024);

static void BM_Cholesky(benchmark::State& state) {
  const auto g = assemble_gram(KernelHandle::matern({1.5, 1, 1}, 1), gen_grid(1, state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(cholesky(g));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Cholesky)->RangeMultiplier(2)->Range(64, 512)->Complexity(benchmark::oNCubed);

static void BM_TraceProduct(benchmark::State& state) {
  const Design d = gen_grid(1, state.range(0));
  const auto k = assemble_gram(KernelHandle::matern({0.5, 1, 1}, 1), d);
  const auto f = cholesky(assemble_gram(KernelHandle::matern({1.5, 1, 1}, 1), d));
  for (auto _ : state) benchmark::DoNotOptimize(trace_product(k, f));
}
BENCHMARK(BM_TraceProduct)->RangeMultiplier(2)->Range(64, 512);

static void BM_Decomposition(benchmark::State& state) {
  const MisspecScenario s{{0.5, 1, 1}, {1.5, 1, 1}, 1};
  const Design d = gen_grid(1, state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(mle_decomposition(s, d));
}
BENCHMARK(BM_Decomposition)->RangeMultiplier(2)->Range(64, 256);
BENCHMARK_MAIN();
