#include "pmklc/error.hpp"

namespace pmklc {

const char* errc_name(errc c) {
  switch (c) {
    case errc::length_mismatch: return "LengthMismatch";
    case errc::token_out_of_range: return "TokenOutOfRange";
    case errc::not_overlapping: return "NotOverlapping";
    case errc::shape_mismatch: return "ShapeMismatch";
    case errc::stale_tape: return "StaleTape";
    case errc::context_length_mismatch: return "ContextLengthMismatch";
    case errc::checksum_mismatch: return "ChecksumMismatch";
    case errc::architecture_mismatch: return "ArchitectureMismatch";
    case errc::missing_logits: return "MissingLogits";
    case errc::batch_mismatch: return "BatchMismatch";
    case errc::invalid_distribution: return "InvalidDistribution";
    case errc::stream_exhausted: return "StreamExhausted";
    case errc::bad_magic: return "BadMagic";
    case errc::unsupported_version: return "UnsupportedVersion";
    case errc::table_inconsistent: return "TableInconsistent";
    case errc::config_invalid: return "ConfigInvalid";
    case errc::io_error: return "IoError";
    case errc::spum_missing: return "SpumMissing";
    case errc::corrupt_stream: return "CorruptStream";
    case errc::corpus_empty: return "CorpusEmpty";
    case errc::target_too_short: return "TargetTooShort";
    case errc::empty_source: return "EmptySource";
    case errc::zero_time: return "ZeroTime";
    case errc::empty_list: return "EmptyList";
    case errc::verification_failed: return "VerificationFailed";
  }
  return "UnknownError";
}

} // namespace pmklc
