#pragma once

#include <optional>
#include <span>

#include "pmklc/container.hpp"
#include "pmklc/mixer.hpp"
#include "pmklc/skmer.hpp"

namespace pmklc {

struct CompressConfig {
  SkParams sk{3, 3};
  uint32_t t = 32;
  uint32_t bs = 320;
  uint32_t workers = 1;
  uint64_t selector_threshold = 500'000'000;
  float smp_fraction = 0.05f; // 0 disables the snapshot handoff
  uint64_t seed = 42;
  uint32_t scale = 4; // divides every model width; 1 = full-size
  std::string pub_model_path; // optional; small-input branch falls back to
                              // dynamic-only when absent

  void validate() const; // raises ConfigInvalid
};

struct WorkerStats {
  uint64_t tokens = 0;
  uint64_t uniform_coded = 0;   // symbols coded under the warmup distribution
  uint64_t pub_calls = 0, priv_calls = 0, dyn_calls = 0; // batch predict calls
  uint64_t snapshot_recv_hash = 0, snapshot_sent_hash = 0;
  ByteVec snapshot_recv_bytes; // only kept when stats are collected
  double early_loss_bits = 0;  // mean bits/symbol over the first 5% of model steps
};

struct PipelineStats {
  std::vector<WorkerStats> workers;
};

/// Even token split into W chunks, W and bs clamped per the rules below so
/// every substream gets at least one model-coded step on small inputs.
struct ChunkPlan {
  struct Range {
    uint64_t start = 0, len = 0;
  };
  std::vector<Range> ranges;
  uint32_t bs = 0;
  uint32_t t = 0;
  uint16_t smp_per_myriad = 0;

  /// snapshot point of chunk i: ceil(fraction * batch steps), integer exact
  uint64_t snapshot_step(size_t chunk) const;
};

ChunkPlan plan_chunks(uint64_t token_count, uint32_t workers, uint32_t bs, uint32_t t,
                      uint16_t smp_per_myriad);

ByteVec compress(ByteSpan raw, const CompressConfig& cfg, PipelineStats* stats = nullptr);

ByteVec decompress(ByteSpan container_bytes, const std::string& pub_model_path = {},
                   uint32_t workers = 1, PipelineStats* stats = nullptr);

/// Diagnostic hook: codes one chunk in isolation, restoring the inbound
/// snapshot when given. compress() uses the same routine internally, so a
/// chunk recoded with its recorded snapshot must reproduce its codestream.
struct ChunkCodeSpec {
  SelectorFlags flags;
  const BiGruModel* pub = nullptr;
  const BiGruModel* priv = nullptr;
  ModelDims dims;
  uint32_t t = 0;
  uint32_t bs = 0;
  uint64_t dm_seed = 0;
  ByteSpan inbound; // empty = fresh seeded init
};
ByteVec encode_chunk_standalone(std::span<const uint32_t> tokens, const ChunkCodeSpec& spec);

} // namespace pmklc
