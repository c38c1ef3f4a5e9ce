#include "pmklc/training.hpp"

#include "pmklc/detmath.hpp"
#include "pmklc/error.hpp"

namespace pmklc {

float train_pass(BiGruModel& model, nn::Adam& adam, std::span<const uint32_t> tokens, uint32_t t,
                 uint32_t batch) {
  const uint64_t n = tokens.size();
  if (n < uint64_t(t) + 1) raise(errc::target_too_short, "need at least t+1 tokens");
  const int64_t vocab = model.dims().vocab;
  auto params = model.params();

  std::vector<uint32_t> ctx;
  BiGruModel::Tape tape;
  Tensor logits;
  float total = 0.0f;
  for (uint64_t p = t; p < n; p += batch) {
    const int64_t rows = int64_t(std::min<uint64_t>(batch, n - p));
    ctx.resize(size_t(rows) * t);
    for (int64_t r = 0; r < rows; ++r)
      for (uint32_t i = 0; i < t; ++i) ctx[size_t(r) * t + i] = tokens[p + uint64_t(r) - t + i];
    model.forward(ctx.data(), rows, t, tape, logits);

    Tensor g({rows, vocab});
    for (int64_t r = 0; r < rows; ++r) {
      const float* lrow = logits.ptr() + r * vocab;
      float* grow = g.ptr() + r * vocab;
      det_softmax(lrow, grow, size_t(vocab));
      const uint32_t tgt = tokens[p + uint64_t(r)];
      total += -det_log(std::max(grow[tgt], 1e-38f));
      grow[tgt] -= 1.0f;
    }
    model.backward(ctx.data(), tape, g);
    adam.step(params);
    model.param_set().zero_grads();
    model.param_set().version += 1;
  }
  return total;
}

std::unique_ptr<BiGruModel> pretrain_public(const std::vector<ByteVec>& corpus,
                                            const TrainConfig& cfg, uint64_t seed) {
  const ModelDims dims = ModelDims::make(cfg.sk.alphabet_size(), cfg.t, cfg.scale);
  std::vector<std::vector<uint32_t>> token_sets;
  for (const ByteVec& file : corpus) {
    auto [stream, exc] = canonicalize(file);
    TokenSequence ts = encode(stream, cfg.sk);
    if (ts.tokens.size() >= uint64_t(cfg.t) + 1) token_sets.push_back(std::move(ts.tokens));
  }
  if (token_sets.empty()) raise(errc::corpus_empty, "no corpus file yields a full context window");

  auto model = std::make_unique<BiGruModel>(dims, 2, seed);
  nn::Adam adam(cfg.adam);
  adam.attach(model->params());
  for (uint32_t e = 0; e < cfg.epochs; ++e)
    for (const auto& toks : token_sets) train_pass(*model, adam, toks, cfg.t, cfg.batch);
  return model;
}

std::unique_ptr<BiGruModel> pretrain_private(std::span<const uint32_t> tokens,
                                             const BiGruModel* pub, const TrainConfig& cfg,
                                             uint64_t seed) {
  if (tokens.size() < uint64_t(cfg.t) + 1) raise(errc::target_too_short, "target shorter than t+1 tokens");
  const ModelDims dims = ModelDims::make(cfg.sk.alphabet_size(), cfg.t, cfg.scale);
  const auto fits = [&](const BiGruModel& m) {
    // deserialized models carry placeholder dynamic-model widths, so compare
    // only the fields this family uses
    return m.dims().vocab == dims.vocab && m.dims().context == dims.context &&
           m.dims().sp_embed == dims.sp_embed && m.dims().sp_hidden == dims.sp_hidden &&
           m.dims().sp_bottleneck == dims.sp_bottleneck;
  };
  std::unique_ptr<BiGruModel> model;
  if (pub && fits(*pub))
    model = derive_private_init(*pub, seed);
  else
    model = std::make_unique<BiGruModel>(dims, 1, seed);
  nn::Adam adam(cfg.adam);
  adam.attach(model->params());
  train_pass(*model, adam, tokens, cfg.t, cfg.batch);
  return model;
}

} // namespace pmklc
