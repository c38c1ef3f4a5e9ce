#pragma once

#include "pmklc/bytes.hpp"
#include "pmklc/layers.hpp"

namespace pmklc::nn {

/// Layout: u32 count, then per parameter (name, rank, dims, byte offset into
/// the blob), then u64 blob size, the raw little-endian float bytes, and a
/// 64-bit checksum over those bytes.
void write_params(const std::vector<const Param*>& params, ByteWriter& w);
void write_params(const std::vector<Param*>& params, ByteWriter& w);

/// Loads values into an already-constructed parameter list. Name or shape
/// disagreement raises ArchitectureMismatch, a bad checksum ChecksumMismatch.
void read_params(const std::vector<Param*>& params, ByteReader& r);

/// Checksum over parameter values in order, used to fingerprint a model.
uint64_t params_hash(const std::vector<const Param*>& params);

} // namespace pmklc::nn
