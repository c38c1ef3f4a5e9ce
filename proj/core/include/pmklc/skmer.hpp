#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "pmklc/alphabet.hpp"

namespace pmklc {

/// Window/step configuration for the (s,k)-mer encoder. Valid range is
/// 1 <= s <= k <= 8: s > k would drop bases, and 4^8 keeps every token
/// distribution within the coder's 16-bit frequency budget.
struct SkParams {
  uint8_t s = 3;
  uint8_t k = 3;

  bool valid() const { return s >= 1 && s <= k && k <= 8; }
  uint32_t alphabet_size() const { return uint32_t(1) << (2 * k); }
  bool operator==(const SkParams&) const = default;
};

/// Base-4 integer tokens covering the stream with step s and window k, plus
/// the trailing bases no full window reaches.
struct TokenSequence {
  std::vector<uint32_t> tokens;
  std::vector<uint8_t> residual;
  SkParams params;

  bool operator==(const TokenSequence&) const = default;
};

/// Token count for a payload of length n: floor((n-k)/s)+1 when n >= k, else 0.
uint64_t token_count(uint64_t n, SkParams p);

/// Map each window to sum(4^(k-1-i) * base[j*s+i]). Output is independent of
/// the worker count; workers > 1 splits the token index range across threads.
TokenSequence encode(const NucleotideStream& stream, SkParams p, unsigned workers = 1);

/// Exact inverse of encode. Throws TokenOutOfRange on tokens >= 4^k.
NucleotideStream decode(const TokenSequence& ts);

/// For s < k, consecutive windows share k-s bases and their digit images must
/// agree. Reports the first disagreeing pair, or nothing when consistent.
/// Throws NotOverlapping when s == k.
struct OverlapReport {
  bool consistent = true;
  size_t first_bad_pair = 0; // index i of the offending (i, i+1) pair
};
OverlapReport overlap_check(const TokenSequence& ts);

} // namespace pmklc
