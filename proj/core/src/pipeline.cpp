#include "pmklc/pipeline.hpp"

#include <cmath>
#include <future>
#include <semaphore>
#include <thread>

#include "pmklc/coder.hpp"
#include "pmklc/detmath.hpp"
#include "pmklc/error.hpp"
#include "pmklc/io.hpp"
#include "pmklc/training.hpp"

namespace pmklc {

void CompressConfig::validate() const {
  if (!sk.valid()) raise(errc::config_invalid, "window parameters need 1 <= s <= k <= 8");
  if (t < 1 || t > 4096) raise(errc::config_invalid, "context length out of range");
  if (bs < 1 || bs > 1'000'000) raise(errc::config_invalid, "substream count out of range");
  if (workers < 1 || workers > 256) raise(errc::config_invalid, "worker count out of range");
  if (!(smp_fraction >= 0.0f) || smp_fraction >= 1.0f)
    raise(errc::config_invalid, "handoff fraction must lie in [0, 1)");
  ModelDims::make(sk.alphabet_size(), t, scale);
}

uint64_t ChunkPlan::snapshot_step(size_t chunk) const {
  const uint64_t steps = ranges[chunk].len / bs;
  const uint64_t s = (uint64_t(smp_per_myriad) * steps + 9999) / 10000;
  return s ? s : 1;
}

ChunkPlan plan_chunks(uint64_t token_count, uint32_t workers, uint32_t bs, uint32_t t,
                      uint16_t smp_per_myriad) {
  ChunkPlan p;
  p.t = t;
  p.smp_per_myriad = smp_per_myriad;
  if (token_count == 0) {
    p.bs = 1;
    return p;
  }
  const uint64_t per_worker = uint64_t(bs) * (uint64_t(t) + 1);
  uint64_t w = std::min<uint64_t>(workers, std::max<uint64_t>(1, token_count / per_worker));
  const uint64_t base = token_count / w, rem = token_count % w;
  uint64_t start = 0;
  for (uint64_t i = 0; i < w; ++i) {
    const uint64_t len = base + (i < rem ? 1 : 0);
    p.ranges.push_back({start, len});
    start += len;
  }
  p.bs = uint32_t(std::min<uint64_t>(bs, std::max<uint64_t>(1, base / (uint64_t(t) + 1))));
  return p;
}

namespace {

constexpr double kLn2 = 0.6931471805599453;

ByteVec pack_tokens(std::span<const uint32_t> tokens, uint8_t k) {
  const unsigned bits = 2u * k;
  ByteVec out;
  uint64_t acc = 0;
  unsigned fill = 0;
  for (uint32_t tok : tokens) {
    acc |= uint64_t(tok) << fill;
    fill += bits;
    while (fill >= 8) {
      out.push_back(uint8_t(acc));
      acc >>= 8;
      fill -= 8;
    }
  }
  if (fill) out.push_back(uint8_t(acc));
  return out;
}

void unpack_tokens(ByteSpan bytes, uint8_t k, std::span<uint32_t> out) {
  const unsigned bits = 2u * k;
  const uint32_t limit = uint32_t(1) << bits;
  uint64_t acc = 0;
  unsigned fill = 0;
  size_t pos = 0;
  for (uint32_t& tok : out) {
    while (fill < bits) {
      if (pos >= bytes.size()) raise(errc::corrupt_stream, "trailer shorter than its token count");
      acc |= uint64_t(bytes[pos++]) << fill;
      fill += 8;
    }
    tok = uint32_t(acc & (limit - 1));
    acc >>= bits;
    fill -= bits;
  }
}

/// Codes one chunk: bs substreams of length L, positions before t under the
/// warmup distribution, the rest through the model stack with a controller
/// update after every coded batch. Encode and decode share every code path
/// that touches model state, which is what makes the two ends bit-identical.
class ChunkWorker {
public:
  ChunkWorker(const ChunkCodeSpec& spec, uint64_t snap_step,
              std::function<void(ByteVec&&)> emit_snapshot, WorkerStats* stats)
      : spec_(spec), snap_step_(snap_step), emit_(std::move(emit_snapshot)), stats_(stats),
        dm_(std::make_unique<AttentionModel>(spec.dims, spec.dm_seed)),
        trainer_(std::make_unique<OnlineTrainer>(dm_.get())),
        uniform_(uniform_dist(uint32_t(spec.dims.vocab))) {
    if (!spec_.inbound.empty()) {
      trainer_->restore(spec_.inbound);
      if (stats_) {
        stats_->snapshot_recv_hash = fnv1a64(spec_.inbound);
        stats_->snapshot_recv_bytes.assign(spec_.inbound.begin(), spec_.inbound.end());
      }
    }
  }

  ByteVec encode(std::span<const uint32_t> tokens) {
    begin(tokens.size());
    ByteVec out;
    RangeEncoder enc(out);
    const uint64_t L = steps_;
    for (uint64_t j = 0; j < L; ++j) {
      if (j < spec_.t) {
        for (uint32_t r = 0; r < spec_.bs; ++r) enc.encode(uniform_, tokens[r * L + j]);
        note_uniform();
      } else {
        model_step(tokens.data(), j);
        for (uint32_t r = 0; r < spec_.bs; ++r) {
          targets_[r] = tokens[r * L + j];
          enc.encode(quantize(row(probs_, r)), targets_[r]);
        }
        train_step();
      }
      maybe_snapshot(j + 1);
    }
    enc.finish();
    finish();
    return out;
  }

  void decode(ByteSpan payload, std::span<uint32_t> tokens) {
    begin(tokens.size());
    RangeDecoder dec(payload);
    const uint64_t L = steps_;
    for (uint64_t j = 0; j < L; ++j) {
      if (j < spec_.t) {
        for (uint32_t r = 0; r < spec_.bs; ++r) tokens[r * L + j] = dec.decode(uniform_);
        note_uniform();
      } else {
        model_step(tokens.data(), j);
        for (uint32_t r = 0; r < spec_.bs; ++r) {
          targets_[r] = dec.decode(quantize(row(probs_, r)));
          tokens[r * L + j] = targets_[r];
        }
        train_step();
      }
      maybe_snapshot(j + 1);
    }
    finish();
  }

private:
  static std::span<const float> row(const Tensor& t, uint32_t r) {
    return {t.ptr() + int64_t(r) * t.dim(1), size_t(t.dim(1))};
  }

  void begin(size_t token_count) {
    steps_ = token_count / spec_.bs;
    // first 5% of batch steps, the window the cold-start diagnostic averages
    warm_window_ = std::max<uint64_t>(1, (steps_ * 500 + 9999) / 10000);
    ctx_.resize(size_t(spec_.bs) * spec_.t);
    targets_.resize(spec_.bs);
    if (stats_) stats_->tokens = token_count;
  }

  void note_uniform() {
    if (stats_) stats_->uniform_coded += spec_.bs;
  }

  void model_step(const uint32_t* tokens, uint64_t j) {
    const uint64_t L = steps_;
    for (uint32_t r = 0; r < spec_.bs; ++r)
      for (uint32_t i = 0; i < spec_.t; ++i)
        ctx_[size_t(r) * spec_.t + i] = tokens[uint64_t(r) * L + (j - spec_.t) + i];

    const int64_t rows = spec_.bs;
    if (spec_.flags.pub_model) {
      spec_.pub->predict(ctx_.data(), rows, spec_.t, lu_);
      if (stats_) stats_->pub_calls += 1;
    }
    if (spec_.flags.priv_model) {
      spec_.priv->predict(ctx_.data(), rows, spec_.t, lr_);
      if (stats_) stats_->priv_calls += 1;
    }
    dm_->forward(ctx_.data(), rows, spec_.t, tape_, lm_);
    if (stats_) stats_->dyn_calls += 1;
    mix(spec_.flags, trainer_->alpha(), spec_.flags.pub_model ? &lu_ : nullptr,
        spec_.flags.priv_model ? &lr_ : nullptr, &lm_, probs_);
  }

  void train_step() {
    const float loss = trainer_->step(spec_.flags, probs_, targets_.data(),
                                      spec_.flags.pub_model ? &lu_ : nullptr,
                                      spec_.flags.priv_model ? &lr_ : nullptr, lm_, tape_);
    if (model_steps_ < warm_window_) warm_loss_ += loss;
    model_steps_ += 1;
  }

  void maybe_snapshot(uint64_t steps_done) {
    if (!emit_ || steps_done != snap_step_) return;
    ByteVec snap = trainer_->snapshot();
    if (stats_) stats_->snapshot_sent_hash = fnv1a64(snap);
    emit_(std::move(snap));
    emit_ = nullptr;
  }

  void finish() {
    if (!stats_) return;
    const uint64_t counted = std::min(model_steps_, warm_window_);
    if (counted)
      stats_->early_loss_bits = warm_loss_ / double(counted * spec_.bs) / kLn2;
  }

  ChunkCodeSpec spec_;
  uint64_t snap_step_ = 0;
  std::function<void(ByteVec&&)> emit_;
  WorkerStats* stats_;
  std::unique_ptr<AttentionModel> dm_;
  std::unique_ptr<OnlineTrainer> trainer_;
  QuantizedDistribution uniform_;

  uint64_t steps_ = 0, model_steps_ = 0, warm_window_ = 0;
  double warm_loss_ = 0;
  std::vector<uint32_t> ctx_, targets_;
  Tensor lu_, lr_, lm_, probs_;
  AttentionModel::Tape tape_;
};

struct LoadedModels {
  std::unique_ptr<BiGruModel> pub, priv;
  uint64_t pub_fingerprint = 0;
};

void check_model_dims(const BiGruModel& m, const ModelDims& want, const char* role) {
  if (m.dims().vocab != want.vocab || m.dims().context != want.context ||
      m.dims().sp_embed != want.sp_embed || m.dims().sp_hidden != want.sp_hidden ||
      m.dims().sp_bottleneck != want.sp_bottleneck)
    raise(errc::architecture_mismatch, std::string(role) + " model does not fit this configuration");
}

/// Runs one coding routine per chunk with the snapshot chain between
/// neighbours. Concurrency is capped by `workers`; a chunk occupies a slot
/// only after its inbound snapshot has arrived, so the cap cannot deadlock
/// the chain.
void run_chunks(size_t count, uint32_t workers, bool smp_on,
                const std::function<void(size_t, ByteSpan, std::function<void(ByteVec&&)>)>& body) {
  if (count == 0) return;
  if (count == 1) {
    body(0, {}, nullptr);
    return;
  }
  std::vector<std::promise<ByteVec>> handoff(count - 1);
  std::counting_semaphore<> slots(std::min<uint32_t>(workers, uint32_t(count)));
  std::vector<std::exception_ptr> errors(count);
  std::vector<std::thread> threads;
  threads.reserve(count);
  for (size_t i = 0; i < count; ++i) {
    threads.emplace_back([&, i] {
      bool sent = !smp_on || i + 1 == count;
      try {
        ByteVec inbound;
        if (smp_on && i > 0) inbound = handoff[i - 1].get_future().get();
        slots.acquire();
        std::function<void(ByteVec&&)> emit;
        if (!sent) emit = [&, i](ByteVec&& b) {
          handoff[i].set_value(std::move(b));
          sent = true;
        };
        body(i, inbound, emit);
        if (!sent) {
          // chunk too short to reach its snapshot step; pass the state as-is
          handoff[i].set_value(ByteVec(inbound));
          sent = true;
        }
        slots.release();
      } catch (...) {
        errors[i] = std::current_exception();
        if (!sent) handoff[i].set_exception(std::current_exception());
        slots.release();
      }
    });
  }
  for (auto& t : threads) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

} // namespace

ByteVec encode_chunk_standalone(std::span<const uint32_t> tokens, const ChunkCodeSpec& spec) {
  ChunkWorker w(spec, 0, nullptr, nullptr);
  return w.encode(tokens);
}

ByteVec compress(ByteSpan raw, const CompressConfig& cfg, PipelineStats* stats) {
  cfg.validate();
  Rng master(cfg.seed);
  const uint64_t dm_seed = master.next_u64();
  const uint64_t sprm_seed = master.next_u64();

  auto [stream, exceptions] = canonicalize(raw);
  TokenSequence ts = encode(stream, cfg.sk, cfg.workers);
  const uint32_t vocab = cfg.sk.alphabet_size();
  const ModelDims dims = ModelDims::make(vocab, cfg.t, cfg.scale);

  SelectorFlags flags = select_models(raw.size(), cfg.selector_threshold);

  LoadedModels models;
  if (!cfg.pub_model_path.empty()) {
    const ByteVec file = read_file(cfg.pub_model_path);
    models.pub = deserialize_model(file);
    models.pub_fingerprint = fnv1a64(file);
    check_model_dims(*models.pub, dims, "public");
  }
  if (flags.pub_model && !models.pub) flags = SelectorFlags{false, false, true};
  if (flags.priv_model && ts.tokens.size() < uint64_t(cfg.t) + 1)
    flags = SelectorFlags{false, false, true};
  if (flags.priv_model) {
    TrainConfig tc;
    tc.sk = cfg.sk;
    tc.t = cfg.t;
    tc.batch = cfg.bs;
    tc.scale = cfg.scale;
    tc.epochs = 1;
    models.priv = pretrain_private(ts.tokens, models.pub.get(), tc, sprm_seed);
  }

  const uint16_t myriad = uint16_t(std::lround(double(cfg.smp_fraction) * 10000.0));
  const ChunkPlan plan = plan_chunks(ts.tokens.size(), cfg.workers, cfg.bs, cfg.t, myriad);
  const size_t W = plan.ranges.size();

  if (stats) stats->workers.assign(W, {});
  std::vector<ByteVec> payloads(W), trailers(W);
  const bool smp_on = myriad > 0;

  run_chunks(W, cfg.workers, smp_on,
             [&](size_t i, ByteSpan inbound, std::function<void(ByteVec&&)> emit) {
               const auto range = plan.ranges[i];
               std::span<const uint32_t> chunk(ts.tokens.data() + range.start, range.len);
               const uint64_t L = range.len / plan.bs;
               ChunkCodeSpec spec{flags,  models.pub.get(), models.priv.get(), dims,
                                  cfg.t,  plan.bs,          dm_seed,           inbound};
               ChunkWorker w(spec, smp_on ? plan.snapshot_step(i) : 0, std::move(emit),
                             stats ? &stats->workers[i] : nullptr);
               payloads[i] = w.encode(chunk.subspan(0, uint64_t(plan.bs) * L));
               trailers[i] = pack_tokens(chunk.subspan(uint64_t(plan.bs) * L), cfg.sk.k);
             });

  Container c;
  c.flags = flags.bits();
  c.s = cfg.sk.s;
  c.k = cfg.sk.k;
  c.t = uint16_t(cfg.t);
  c.bs = plan.bs;
  c.smp_per_myriad = myriad;
  c.dm_seed = dm_seed;
  // the seed field doubles as the width divisor when no private model ships,
  // so the decoder can rebuild the dynamic model's architecture
  c.sprm_seed = flags.priv_model ? sprm_seed : uint64_t(cfg.scale);
  c.pub_fingerprint = flags.pub_model ? models.pub_fingerprint : 0;
  c.original_len = raw.size();
  for (const auto& rg : plan.ranges) c.chunks.push_back({rg.start, rg.len, 0, 0, 0});
  if (flags.priv_model) c.private_model = serialize_model(*models.priv);
  c.exceptions = std::move(exceptions);
  c.residual = std::move(ts.residual);
  c.payloads = std::move(payloads);
  c.trailers = std::move(trailers);
  return write_container(c);
}

ByteVec decompress(ByteSpan container_bytes, const std::string& pub_model_path, uint32_t workers,
                   PipelineStats* stats) {
  const Container c = read_container(container_bytes);
  const SelectorFlags flags = SelectorFlags::from_bits(c.flags);
  if (!flags.dyn_model) raise(errc::table_inconsistent, "dynamic model flag must be set");
  const SkParams sk{c.s, c.k};
  if (!sk.valid() || c.t < 1 || c.bs < 1) raise(errc::table_inconsistent, "coding parameters");
  if (workers < 1) workers = 1;

  LoadedModels models;
  uint32_t scale = 0;
  if (flags.priv_model) {
    models.priv = deserialize_model(c.private_model);
    const int64_t se = models.priv->dims().sp_embed;
    if (se < 1 || 16 % se != 0) raise(errc::architecture_mismatch, "private model width");
    scale = uint32_t(16 / se);
  } else {
    if (c.sprm_seed < 1 || c.sprm_seed > 16)
      raise(errc::table_inconsistent, "model width divisor");
    scale = uint32_t(c.sprm_seed);
  }
  const ModelDims dims = ModelDims::make(sk.alphabet_size(), c.t, scale);
  if (flags.priv_model) check_model_dims(*models.priv, dims, "private");
  if (flags.pub_model) {
    if (pub_model_path.empty())
      raise(errc::spum_missing, "container requires the public model file");
    const ByteVec file = read_file(pub_model_path);
    if (fnv1a64(file) != c.pub_fingerprint)
      raise(errc::checksum_mismatch, "public model file does not match the container");
    models.pub = deserialize_model(file);
    check_model_dims(*models.pub, dims, "public");
  }

  uint64_t total_tokens = 0;
  for (const auto& e : c.chunks) total_tokens += e.token_len;
  const uint64_t payload_bases = c.original_len - std::min<uint64_t>(c.original_len, c.exceptions.entries.size());
  if (token_count(payload_bases, sk) != total_tokens)
    raise(errc::corrupt_stream, "token count does not match the original length");

  std::vector<uint32_t> tokens(static_cast<size_t>(total_tokens));
  if (stats) stats->workers.assign(c.chunks.size(), {});
  const bool smp_on = c.smp_per_myriad > 0;
  ChunkPlan plan;
  plan.bs = c.bs;
  plan.t = c.t;
  plan.smp_per_myriad = c.smp_per_myriad;
  for (const auto& e : c.chunks) plan.ranges.push_back({e.token_start, e.token_len});

  run_chunks(c.chunks.size(), workers, smp_on,
             [&](size_t i, ByteSpan inbound, std::function<void(ByteVec&&)> emit) {
               const auto& e = c.chunks[i];
               const uint64_t L = e.token_len / c.bs;
               std::span<uint32_t> slice(tokens.data() + e.token_start, e.token_len);
               ChunkCodeSpec spec{flags, models.pub.get(), models.priv.get(), dims,
                                  c.t,   c.bs,             c.dm_seed,         inbound};
               ChunkWorker w(spec, smp_on ? plan.snapshot_step(i) : 0, std::move(emit),
                             stats ? &stats->workers[i] : nullptr);
               w.decode(c.payloads[i], slice.subspan(0, uint64_t(c.bs) * L));
               const uint64_t leftover = e.token_len - uint64_t(c.bs) * L;
               if ((uint64_t(c.trailers[i].size()) * 8) / (2 * c.k) < leftover)
                 raise(errc::corrupt_stream, "trailer too short");
               unpack_tokens(c.trailers[i], c.k, slice.subspan(uint64_t(c.bs) * L));
             });

  TokenSequence ts;
  ts.tokens = std::move(tokens);
  ts.residual = c.residual;
  ts.params = sk;
  NucleotideStream stream = decode(ts);
  if (stream.length() != payload_bases) raise(errc::corrupt_stream, "decoded base count");
  return restore(stream, c.exceptions, c.original_len);
}

} // namespace pmklc
