#pragma once

#include <span>

#include "pmklc/models.hpp"
#include "pmklc/skmer.hpp"

namespace pmklc {

struct TrainConfig {
  SkParams sk{3, 3};
  uint32_t t = 32;
  uint32_t batch = 64;
  uint32_t scale = 4;
  uint32_t epochs = 2;
  nn::AdamConfig adam;
};

/// Plain next-token cross-entropy over sliding contexts, sequential batch
/// order, no shuffling. Returns the summed loss of the pass.
float train_pass(BiGruModel& model, nn::Adam& adam, std::span<const uint32_t> tokens, uint32_t t,
                 uint32_t batch);

/// Corpus-pretrained public model (two recurrent layers, cfg.epochs passes).
/// Files too short to yield a single context are skipped; raises CorpusEmpty
/// when nothing usable remains.
std::unique_ptr<BiGruModel> pretrain_public(const std::vector<ByteVec>& corpus,
                                            const TrainConfig& cfg, uint64_t seed);

/// Per-input private model: single recurrent layer, weights seeded from the
/// public model when one is given (embedding + first layer copied), one
/// training pass over the target tokens. Raises TargetTooShort below t+1
/// tokens.
std::unique_ptr<BiGruModel> pretrain_private(std::span<const uint32_t> tokens,
                                             const BiGruModel* pub, const TrainConfig& cfg,
                                             uint64_t seed);

} // namespace pmklc
