#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "pmklc/bytes.hpp"

namespace pmklc {

/// Pure A/C/G/T payload as base codes {A=0, C=1, G=2, T=3}.
struct NucleotideStream {
  std::vector<uint8_t> payload;

  size_t length() const { return payload.size(); }
};

/// Bytes of the original input that are not uppercase A/C/G/T, keyed by their
/// byte offset in the original input. Positions are strictly increasing.
struct ExceptionChannel {
  struct Entry {
    uint64_t position;
    uint8_t original_byte;
    bool operator==(const Entry&) const = default;
  };
  std::vector<Entry> entries;

  bool operator==(const ExceptionChannel&) const = default;

  void serialize(ByteWriter& w) const;
  static ExceptionChannel deserialize(ByteReader& r);
};

/// Split arbitrary bytes into an ACGT payload plus the exception side-channel.
/// Total function; restore() inverts it exactly.
std::pair<NucleotideStream, ExceptionChannel> canonicalize(ByteSpan raw);

/// Inverse of canonicalize. Throws LengthMismatch when the payload length and
/// exception count do not add up to original_len (corrupt container).
ByteVec restore(const NucleotideStream& stream, const ExceptionChannel& exc, uint64_t original_len);

/// -1 for non-ACGT bytes, else the base code.
int base_code(uint8_t byte);
uint8_t base_char(uint8_t code);

} // namespace pmklc
