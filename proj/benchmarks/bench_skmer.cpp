#include <benchmark/benchmark.h>

#include "pmklc/rng.hpp"
#include "pmklc/skmer.hpp"

using namespace pmklc;

namespace {

NucleotideStream make_stream(size_t n) {
  Rng rng(1);
  NucleotideStream s;
  s.payload.resize(n);
  for (auto& b : s.payload) b = uint8_t(rng.next_below(4));
  return s;
}

void BM_tokenize(benchmark::State& state) {
  const auto s = uint8_t(state.range(0)), k = uint8_t(state.range(1));
  const auto workers = unsigned(state.range(2));
  const NucleotideStream stream = make_stream(1 << 20);
  for (auto _ : state) {
    TokenSequence ts = encode(stream, SkParams{s, k}, workers);
    benchmark::DoNotOptimize(ts.tokens.data());
  }
  state.SetBytesProcessed(int64_t(state.iterations()) * int64_t(stream.length()));
}

void BM_detokenize(benchmark::State& state) {
  const auto s = uint8_t(state.range(0)), k = uint8_t(state.range(1));
  const NucleotideStream stream = make_stream(1 << 20);
  const TokenSequence ts = encode(stream, SkParams{s, k});
  for (auto _ : state) {
    NucleotideStream back = decode(ts);
    benchmark::DoNotOptimize(back.payload.data());
  }
  state.SetBytesProcessed(int64_t(state.iterations()) * int64_t(stream.length()));
}

} // namespace

BENCHMARK(BM_tokenize)->Args({3, 3, 1})->Args({3, 3, 2})->Args({1, 3, 1})->Args({4, 4, 1});
BENCHMARK(BM_detokenize)->Args({3, 3, 0})->Args({1, 3, 0});
