#pragma once

#include <stdexcept>
#include <string>

namespace pmklc {

enum class errc {
  // alphabet / skmer
  length_mismatch,
  token_out_of_range,
  not_overlapping,
  // neural
  shape_mismatch,
  stale_tape,
  context_length_mismatch,
  // models
  checksum_mismatch,
  architecture_mismatch,
  // mixer
  missing_logits,
  batch_mismatch,
  // coder
  invalid_distribution,
  stream_exhausted,
  // container
  bad_magic,
  unsupported_version,
  table_inconsistent,
  // pipeline
  config_invalid,
  io_error,
  spum_missing,
  corrupt_stream,
  // training
  corpus_empty,
  target_too_short,
  // metrics
  empty_source,
  zero_time,
  empty_list,
  verification_failed,
};

const char* errc_name(errc c);

/// Exception carrying a machine-checkable error code plus a human message.
class error : public std::runtime_error {
public:
  error(errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

  errc code() const noexcept { return code_; }

private:
  errc code_;
};

[[noreturn]] inline void raise(errc code, const std::string& what) { throw error(code, what); }

} // namespace pmklc
