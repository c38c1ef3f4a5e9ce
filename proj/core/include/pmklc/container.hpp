#pragma once

#include "pmklc/alphabet.hpp"
#include "pmklc/bytes.hpp"

namespace pmklc {

constexpr uint8_t kContainerVersion = 1;

struct ChunkEntry {
  uint64_t token_start = 0;
  uint64_t token_len = 0;
  uint64_t payload_offset = 0; // absolute file offset of the codestream
  uint64_t payload_len = 0;    // codestream bytes only
  uint32_t trailer_len = 0;    // packed leftover-token bytes after it
  bool operator==(const ChunkEntry&) const = default;
};

/// Everything a decoder needs, in file order: fixed header, chunk table,
/// embedded private model, exception channel, tail bases that no token
/// covers, per-chunk payloads, and a whole-file checksum.
struct Container {
  uint8_t flags = 0; // bit0 public, bit1 private, bit2 dynamic
  uint8_t s = 3, k = 3;
  uint16_t t = 32;
  uint32_t bs = 320;
  uint16_t smp_per_myriad = 500; // handoff fraction in 1/10000 units; 0 = off
  uint64_t dm_seed = 0;
  uint64_t sprm_seed = 0;
  uint64_t pub_fingerprint = 0; // checksum of the public model file, 0 if unused
  uint64_t original_len = 0;
  std::vector<ChunkEntry> chunks;
  ByteVec private_model;
  ExceptionChannel exceptions;
  std::vector<uint8_t> residual; // base codes after the last full token window
  std::vector<ByteVec> payloads; // codestreams, one per chunk
  std::vector<ByteVec> trailers; // packed leftover tokens, one per chunk

  bool operator==(const Container&) const = default;
};

ByteVec write_container(const Container& c);

/// Validates magic, version, whole-file checksum and table consistency
/// before returning. Corruption raises ChecksumMismatch, structural
/// impossibilities TableInconsistent.
Container read_container(ByteSpan bytes);

} // namespace pmklc
