#include <benchmark/benchmark.h>

#include "msd/datagen.hpp"
#include "msd/gemm_sim.hpp"

namespace {

void BM_GemmDequant(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const msd::SimMatrix x = msd::gen_activation(
      8, n, {msd::DistKind::gaussian, 0.0, 1.0}, {42, 0});
  const msd::QuantizedWeight w = msd::gen_int8_weight(n, n, {42, 0});
  for (auto _ : state) {
    auto y = msd::gemm_dequant(x, w);
    benchmark::DoNotOptimize(y);
  }
  state.SetItemsProcessed(state.iterations() * 8 * n * n);
}
BENCHMARK(BM_GemmDequant)->Arg(512)->Arg(1024);

void BM_GemmMsdInt8(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const msd::SimMatrix x = msd::gen_activation(
      8, n, {msd::DistKind::gaussian, 0.0, 1.0}, {42, 0});
  const msd::QuantizedWeight w = msd::gen_int8_weight(n, n, {42, 0});
  for (auto _ : state) {
    auto y = msd::gemm_msd_int8(x, w);
    benchmark::DoNotOptimize(y);
  }
  state.SetItemsProcessed(state.iterations() * 8 * n * n);
}
BENCHMARK(BM_GemmMsdInt8)->Arg(512)->Arg(1024);

}  // namespace

BENCHMARK_MAIN();
