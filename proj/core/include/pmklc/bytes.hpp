#pragma once

#include <cstdint>
#include <cstring>
#include <span>
#include <string>
#include <vector>

#include "pmklc/error.hpp"

namespace pmklc {

using ByteVec = std::vector<uint8_t>;
using ByteSpan = std::span<const uint8_t>;

/// FNV-1a 64-bit hash, used for all integrity checksums.
inline uint64_t fnv1a64(ByteSpan bytes, uint64_t seed = 0xcbf29ce484222325ull) {
  uint64_t h = seed;
  for (uint8_t b : bytes) {
    h ^= b;
    h *= 0x100000001b3ull;
  }
  return h;
}

/// Little-endian append-only byte sink.
class ByteWriter {
public:
  explicit ByteWriter(ByteVec& out) : out_(out) {}

  void u8(uint8_t v) { out_.push_back(v); }
  void u16(uint16_t v) {
    for (int i = 0; i < 2; ++i) out_.push_back(uint8_t(v >> (8 * i)));
  }
  void u32(uint32_t v) {
    for (int i = 0; i < 4; ++i) out_.push_back(uint8_t(v >> (8 * i)));
  }
  void u64(uint64_t v) {
    for (int i = 0; i < 8; ++i) out_.push_back(uint8_t(v >> (8 * i)));
  }
  void f32(float v) {
    uint32_t bits;
    std::memcpy(&bits, &v, 4);
    u32(bits);
  }
  void bytes(ByteSpan b) { out_.insert(out_.end(), b.begin(), b.end()); }
  void str(const std::string& s) {
    u32(uint32_t(s.size()));
    out_.insert(out_.end(), s.begin(), s.end());
  }

  size_t size() const { return out_.size(); }

private:
  ByteVec& out_;
};

/// Little-endian cursor over a byte buffer. Throws on over-read so truncated
/// containers surface as errors instead of crashes.
class ByteReader {
public:
  explicit ByteReader(ByteSpan in, errc overrun = errc::table_inconsistent)
      : in_(in), overrun_(overrun) {}

  uint8_t u8() { return take(1)[0]; }
  uint16_t u16() {
    auto b = take(2);
    return uint16_t(b[0]) | uint16_t(b[1]) << 8;
  }
  uint32_t u32() {
    auto b = take(4);
    uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= uint32_t(b[i]) << (8 * i);
    return v;
  }
  uint64_t u64() {
    auto b = take(8);
    uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= uint64_t(b[i]) << (8 * i);
    return v;
  }
  float f32() {
    uint32_t bits = u32();
    float v;
    std::memcpy(&v, &bits, 4);
    return v;
  }
  ByteSpan bytes(size_t n) { return take(n); }
  std::string str() {
    uint32_t n = u32();
    auto b = take(n);
    return std::string(b.begin(), b.end());
  }

  size_t pos() const { return pos_; }
  size_t remaining() const { return in_.size() - pos_; }

private:
  ByteSpan take(size_t n) {
    if (n > in_.size() - pos_) raise(overrun_, "unexpected end of data");
    ByteSpan s = in_.subspan(pos_, n);
    pos_ += n;
    return s;
  }

  ByteSpan in_;
  size_t pos_ = 0;
  errc overrun_;
};

} // namespace pmklc
