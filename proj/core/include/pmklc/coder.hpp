#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "pmklc/bytes.hpp"

namespace pmklc {

/// Integer image of a model distribution: frequencies over the token alphabet,
/// each >= 1, summing to exactly 2^16.
struct QuantizedDistribution {
  static constexpr uint32_t kTotal = 1u << 16;

  std::vector<uint32_t> freqs;
  std::vector<uint32_t> cum; // cum[i] = sum of freqs[0..i), cum[n] == kTotal

  uint32_t width() const { return uint32_t(freqs.size()); }
};

/// Largest-remainder quantization: freqs[i] = max(1, floor(p[i]*2^16)), then
/// the deficit or surplus is settled by remainder rank, ties by ascending
/// symbol index. Deterministic. Throws InvalidDistribution when p is not a
/// positive vector summing to 1 within 1e-5.
QuantizedDistribution quantize(std::span<const float> p);

/// Near-equal frequencies summing to 2^16 (the warmup distribution for the
/// first t symbols of every substream).
QuantizedDistribution uniform_dist(uint32_t width);

/// Range coder with 64-bit state, byte-wise renormalization, and carry
/// propagation by back-patching the output buffer. The 16-bit frequency total
/// against a >=2^56 range keeps per-symbol truncation loss below 2^-40 bits,
/// so total overhead is the 8-byte flush.
class RangeEncoder {
public:
  explicit RangeEncoder(ByteVec& out) : out_(out) {}

  void encode(const QuantizedDistribution& dist, uint32_t symbol);
  /// Commits the final interval; exactly 8 bytes. Call once.
  void finish();

private:
  void propagate_carry();

  ByteVec& out_;
  uint64_t low_ = 0;
  uint64_t range_ = ~uint64_t(0);
};

class RangeDecoder {
public:
  explicit RangeDecoder(ByteSpan in);

  uint32_t decode(const QuantizedDistribution& dist);

  size_t consumed() const { return pos_; }

private:
  uint8_t next_byte();

  ByteSpan in_;
  size_t pos_ = 0;
  uint64_t code_ = 0;
  uint64_t range_ = ~uint64_t(0);
};

} // namespace pmklc
