#pragma once

#include <cstdint>

namespace pmklc {

/// SplitMix64 generator. Chosen because the whole sequence is defined by pure
/// 64-bit integer arithmetic, so identical seeds give identical draws on any
/// platform, which the compression/decompression symmetry depends on.
class Rng {
public:
  explicit Rng(uint64_t seed) : state_(seed) {}

  uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ull;
    uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  /// Uniform in [0, 1) with 24 bits of precision; exact float conversion.
  float next_float() { return float(next_u64() >> 40) * 0x1.0p-24f; }

  /// Uniform in [lo, hi).
  float next_float(float lo, float hi) { return lo + (hi - lo) * next_float(); }

  uint64_t next_below(uint64_t bound) { return next_u64() % bound; }

  /// Independent child stream; advances this generator by one draw.
  Rng split() { return Rng(next_u64() ^ 0xd1b54a32d192ed03ull); }

private:
  uint64_t state_;
};

} // namespace pmklc
