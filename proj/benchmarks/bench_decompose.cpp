#include <benchmark/benchmark.h>

#include "msd/datagen.hpp"
#include "msd/int8_decompose.hpp"
#include "msd/mx_formats.hpp"

namespace {

void BM_Decompose2(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const msd::SimMatrix x = msd::gen_activation(
      1, n, {msd::DistKind::gaussian, 0.0, 1.0}, {42, 0});
  for (auto _ : state) {
    auto d = msd::decompose2({x.row(0), static_cast<std::size_t>(n)});
    benchmark::DoNotOptimize(d);
  }
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_Decompose2)->Arg(1024)->Arg(4096)->Arg(16384);

void BM_MxfpDecomposeBlock(benchmark::State& state) {
  const msd::SimMatrix x = msd::gen_activation(
      1, msd::kMxBlock, {msd::DistKind::gaussian, 0.0, 1.0}, {42, 0});
  for (auto _ : state) {
    auto b = msd::mxfp4_decompose_block(
        {x.row(0), static_cast<std::size_t>(msd::kMxBlock)});
    benchmark::DoNotOptimize(b);
  }
  state.SetItemsProcessed(state.iterations() * msd::kMxBlock);
}
BENCHMARK(BM_MxfpDecomposeBlock);

}  // namespace
