#include <benchmark/benchmark.h>

#include <vector>

#include "pmklc/coder.hpp"
#include "pmklc/rng.hpp"

using namespace pmklc;

namespace {

struct CoderFixture {
  std::vector<QuantizedDistribution> dists;
  std::vector<uint32_t> syms;
  ByteVec coded;

  explicit CoderFixture(uint32_t width, size_t n) {
    Rng rng(2);
    for (int d = 0; d < 16; ++d) {
      std::vector<float> p(width);
      double sum = 0;
      for (auto& v : p) {
        v = 1e-3f + rng.next_float();
        sum += v;
      }
      for (auto& v : p) v = float(double(v) / sum);
      dists.push_back(quantize(p));
    }
    syms.resize(n);
    for (auto& s : syms) s = uint32_t(rng.next_below(width));
    RangeEncoder enc(coded);
    for (size_t i = 0; i < syms.size(); ++i) enc.encode(dists[i % dists.size()], syms[i]);
    enc.finish();
  }
};

void BM_range_encode(benchmark::State& state) {
  const CoderFixture fx(uint32_t(state.range(0)), 100000);
  for (auto _ : state) {
    ByteVec out;
    RangeEncoder enc(out);
    for (size_t i = 0; i < fx.syms.size(); ++i) enc.encode(fx.dists[i % fx.dists.size()], fx.syms[i]);
    enc.finish();
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(int64_t(state.iterations()) * int64_t(fx.syms.size()));
}

void BM_range_decode(benchmark::State& state) {
  const CoderFixture fx(uint32_t(state.range(0)), 100000);
  for (auto _ : state) {
    RangeDecoder dec(fx.coded);
    uint32_t last = 0;
    for (size_t i = 0; i < fx.syms.size(); ++i) last = dec.decode(fx.dists[i % fx.dists.size()]);
    benchmark::DoNotOptimize(last);
  }
  state.SetItemsProcessed(int64_t(state.iterations()) * int64_t(fx.syms.size()));
}

void BM_quantize(benchmark::State& state) {
  Rng rng(3);
  std::vector<float> p(size_t(state.range(0)));
  double sum = 0;
  for (auto& v : p) {
    v = 1e-3f + rng.next_float();
    sum += v;
  }
  for (auto& v : p) v = float(double(v) / sum);
  for (auto _ : state) {
    QuantizedDistribution d = quantize(p);
    benchmark::DoNotOptimize(d.freqs.data());
  }
}

} // namespace

BENCHMARK(BM_range_encode)->Arg(16)->Arg(64)->Arg(256);
BENCHMARK(BM_range_decode)->Arg(16)->Arg(64)->Arg(256);
BENCHMARK(BM_quantize)->Arg(16)->Arg(64)->Arg(256);
