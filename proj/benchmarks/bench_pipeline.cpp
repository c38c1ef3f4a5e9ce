#include <benchmark/benchmark.h>

#include "pmklc/pipeline.hpp"
#include "pmklc/rng.hpp"

using namespace pmklc;

namespace {

ByteVec make_acgt(size_t n) {
  Rng rng(4);
  static const char bases[4] = {'A', 'C', 'G', 'T'};
  ByteVec out(n);
  for (auto& b : out) b = uint8_t(bases[rng.next_below(4)]);
  return out;
}

CompressConfig bench_cfg(uint32_t workers) {
  CompressConfig cfg;
  cfg.sk = SkParams{2, 2};
  cfg.t = 8;
  cfg.bs = 64;
  cfg.workers = workers;
  cfg.scale = 16;
  cfg.selector_threshold = uint64_t(1) << 40; // dynamic model only
  return cfg;
}

void BM_compress(benchmark::State& state) {
  const ByteVec raw = make_acgt(size_t(state.range(0)));
  const CompressConfig cfg = bench_cfg(uint32_t(state.range(1)));
  for (auto _ : state) {
    ByteVec packed = compress(raw, cfg);
    benchmark::DoNotOptimize(packed.data());
  }
  state.SetBytesProcessed(int64_t(state.iterations()) * int64_t(raw.size()));
}

void BM_decompress(benchmark::State& state) {
  const ByteVec raw = make_acgt(size_t(state.range(0)));
  const CompressConfig cfg = bench_cfg(1);
  const ByteVec packed = compress(raw, cfg);
  for (auto _ : state) {
    ByteVec back = decompress(packed);
    benchmark::DoNotOptimize(back.data());
  }
  state.SetBytesProcessed(int64_t(state.iterations()) * int64_t(raw.size()));
}

} // namespace

BENCHMARK(BM_compress)->Args({16384, 1})->Args({65536, 1})->Args({65536, 2})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_decompress)->Arg(16384)->Arg(65536)->Unit(benchmark::kMillisecond);
