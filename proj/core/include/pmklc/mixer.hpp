#pragma once

#include "pmklc/adam.hpp"
#include "pmklc/models.hpp"

namespace pmklc {

/// Which predictors vote: the shared public model, the per-input private
/// model, and the online-trained dynamic model.
struct SelectorFlags {
  bool pub_model = false;
  bool priv_model = false;
  bool dyn_model = true;

  uint8_t bits() const {
    return uint8_t((pub_model ? 1 : 0) | (priv_model ? 2 : 0) | (dyn_model ? 4 : 0));
  }
  static SelectorFlags from_bits(uint8_t b) {
    return {(b & 1) != 0, (b & 2) != 0, (b & 4) != 0};
  }
  bool operator==(const SelectorFlags&) const = default;
};

/// Inputs at or under the threshold use public+dynamic, larger ones train a
/// private model instead of shipping the public one.
SelectorFlags select_models(uint64_t input_bytes, uint64_t threshold_bytes);

/// probs = softmax(alpha*(S0*lu + S1*lr) + (1-alpha)*S2*lm), fixed op order.
void mix_row(const SelectorFlags& f, float alpha, const float* lu, const float* lr,
             const float* lm, float* probs, size_t width);

/// Batch form; logits for a disabled flag may be null, enabled-but-null
/// raises MissingLogits, row-count disagreement BatchMismatch.
void mix(const SelectorFlags& f, float alpha, const Tensor* lu, const Tensor* lr, const Tensor* lm,
         Tensor& probs);

/// Owns the trainable state of one compression worker: the dynamic model's
/// optimizer plus the blend weight. Gradients flow only to those; the static
/// models never update.
class OnlineTrainer {
public:
  OnlineTrainer(AttentionModel* dm, nn::AdamConfig cfg = {});

  float alpha() const;
  float alpha_raw() const { return alpha_.value.data[0]; }

  /// One update from a coded batch. probs must be the mixed distributions the
  /// coder used, targets the symbols actually coded. Returns the summed
  /// cross-entropy of the batch.
  float step(const SelectorFlags& f, const Tensor& probs, const uint32_t* targets,
             const Tensor* lu, const Tensor* lr, const Tensor& lm, AttentionModel::Tape& tape);

  uint64_t trained_steps() const { return adam_.steps(); }

  ByteVec snapshot() const;
  void restore(ByteSpan bytes);

private:
  std::vector<nn::Param*> trainables();

  AttentionModel* dm_;
  nn::Param alpha_;
  nn::Adam adam_;
};

} // namespace pmklc
