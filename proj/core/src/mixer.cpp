#include "pmklc/mixer.hpp"

#include "pmklc/detmath.hpp"
#include "pmklc/error.hpp"
#include "pmklc/weights.hpp"

namespace pmklc {

SelectorFlags select_models(uint64_t input_bytes, uint64_t threshold_bytes) {
  if (input_bytes <= threshold_bytes) return {true, false, true};
  return {false, true, true};
}

void mix_row(const SelectorFlags& f, float alpha, const float* lu, const float* lr,
             const float* lm, float* probs, size_t width) {
  std::vector<float> z(width);
  const float s0 = f.pub_model ? 1.0f : 0.0f;
  const float s1 = f.priv_model ? 1.0f : 0.0f;
  const float s2 = f.dyn_model ? 1.0f : 0.0f;
  for (size_t i = 0; i < width; ++i) {
    const float stat = s0 * (lu ? lu[i] : 0.0f) + s1 * (lr ? lr[i] : 0.0f);
    z[i] = alpha * stat + (1.0f - alpha) * s2 * (lm ? lm[i] : 0.0f);
  }
  det_softmax(z.data(), probs, width);
}

void mix(const SelectorFlags& f, float alpha, const Tensor* lu, const Tensor* lr, const Tensor* lm,
         Tensor& probs) {
  if (f.pub_model && !lu) raise(errc::missing_logits, "public model enabled without logits");
  if (f.priv_model && !lr) raise(errc::missing_logits, "private model enabled without logits");
  if (f.dyn_model && !lm) raise(errc::missing_logits, "dynamic model enabled without logits");
  const Tensor* any = f.dyn_model ? lm : (f.pub_model ? lu : lr);
  if (!any) raise(errc::missing_logits, "no model enabled");
  const int64_t rows = any->dim(0), width = any->dim(1);
  for (const Tensor* t : {lu, lr, lm})
    if (t && (t->dim(0) != rows || t->dim(1) != width))
      raise(errc::batch_mismatch, "logit batch shapes disagree");
  probs = Tensor({rows, width});
  for (int64_t r = 0; r < rows; ++r)
    mix_row(f, alpha, lu ? lu->ptr() + r * width : nullptr, lr ? lr->ptr() + r * width : nullptr,
            lm ? lm->ptr() + r * width : nullptr, probs.ptr() + r * width, size_t(width));
}

OnlineTrainer::OnlineTrainer(AttentionModel* dm, nn::AdamConfig cfg)
    : dm_(dm), alpha_{"alpha", Tensor({1}), Tensor({1})}, adam_(cfg) {
  adam_.attach(trainables());
}

std::vector<nn::Param*> OnlineTrainer::trainables() {
  auto v = dm_->params();
  v.push_back(&alpha_);
  return v;
}

float OnlineTrainer::alpha() const { return det_sigmoid(alpha_.value.data[0]); }

float OnlineTrainer::step(const SelectorFlags& f, const Tensor& probs, const uint32_t* targets,
                          const Tensor* lu, const Tensor* lr, const Tensor& lm,
                          AttentionModel::Tape& tape) {
  if (!f.dyn_model) raise(errc::config_invalid, "training step without the dynamic model");
  const int64_t rows = probs.dim(0), width = probs.dim(1);
  if (tape.rows != rows || lm.dim(0) != rows) raise(errc::batch_mismatch, "training batch shapes");

  const float a = alpha();
  float loss = 0.0f;
  Tensor g = probs; // becomes dCE/dz
  float dalpha = 0.0f;
  const float s0 = f.pub_model ? 1.0f : 0.0f;
  const float s1 = f.priv_model ? 1.0f : 0.0f;
  for (int64_t r = 0; r < rows; ++r) {
    float* grow = g.ptr() + r * width;
    const uint32_t tgt = targets[r];
    if (tgt >= uint32_t(width)) raise(errc::token_out_of_range, "training target");
    loss += -det_log(std::max(grow[tgt], 1e-38f));
    grow[tgt] -= 1.0f;
    const float* lur = lu ? lu->ptr() + r * width : nullptr;
    const float* lrr = lr ? lr->ptr() + r * width : nullptr;
    const float* lmr = lm.ptr() + r * width;
    for (int64_t i = 0; i < width; ++i) {
      const float stat = s0 * (lur ? lur[i] : 0.0f) + s1 * (lrr ? lrr[i] : 0.0f);
      dalpha += grow[i] * (stat - lmr[i]);
    }
  }
  alpha_.grad.data[0] += dalpha * a * (1.0f - a);

  Tensor dlm = g;
  const float w = 1.0f - a;
  for (float& v : dlm.data) v *= w;
  dm_->backward(tape, dlm);

  auto params = trainables();
  adam_.step(params);
  dm_->param_set().zero_grads();
  alpha_.grad.zero();
  dm_->param_set().version += 1;
  return loss;
}

ByteVec OnlineTrainer::snapshot() const {
  ByteVec out;
  ByteWriter w(out);
  auto params = const_cast<OnlineTrainer*>(this)->trainables();
  nn::write_params(params, w);
  adam_.serialize(w);
  return out;
}

void OnlineTrainer::restore(ByteSpan bytes) {
  ByteReader r(bytes, errc::corrupt_stream);
  auto params = trainables();
  nn::read_params(params, r);
  adam_.deserialize(r, params);
  dm_->param_set().version += 1;
}

} // namespace pmklc
