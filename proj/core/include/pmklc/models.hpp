#pragma once

#include <memory>

#include "pmklc/adam.hpp"
#include "pmklc/bytes.hpp"
#include "pmklc/layers.hpp"

namespace pmklc {

/// Layer widths for both predictor families. `scale` divides every width
/// (head count stays fixed); scale 1 is the full-size configuration.
struct ModelDims {
  int64_t vocab = 0;
  int64_t context = 0;
  int64_t sp_embed = 0, sp_hidden = 0, sp_bottleneck = 0;
  int64_t dm_embed = 0, dm_hidden = 0, dm_ffn = 0, dm_heads = 8;

  static ModelDims make(uint32_t vocab, uint32_t context, uint32_t scale);
  bool operator==(const ModelDims&) const = default;
};

/// Frozen context predictor: embedding, stacked bidirectional GRUs, a tanh
/// bottleneck over the final states, and a vocab-sized head. Two layers for
/// the shared public model, one for the per-input private model.
class BiGruModel {
public:
  BiGruModel(const ModelDims& dims, int gru_layers, uint64_t init_seed);

  const ModelDims& dims() const { return dims_; }
  int gru_layers() const { return int(grus_.size()); }

  struct Tape {
    Tensor emb;
    std::vector<nn::BiGru::Tape> gru;
    std::vector<Tensor> gru_out;
    Tensor fin, bott_act;
    int64_t rows = 0;
    uint64_t version = 0;
  };

  /// contexts: row-major [rows, steps] token ids; steps must equal dims.context
  void forward(const uint32_t* contexts, int64_t rows, int64_t steps, Tape& tape,
               Tensor& logits) const;
  void backward(const uint32_t* contexts, const Tape& tape, const Tensor& dlogits);
  /// tape-free frozen path; safe to call concurrently from several threads
  void predict(const uint32_t* contexts, int64_t rows, int64_t steps, Tensor& logits) const;

  std::vector<nn::Param*> params() { return ps_.all(); }
  std::vector<const nn::Param*> params() const { return ps_.all(); }
  nn::ParamSet& param_set() { return ps_; }
  uint64_t fingerprint() const;

private:
  ModelDims dims_;
  nn::ParamSet ps_;
  std::unique_ptr<nn::Embedding> emb_;
  std::vector<nn::BiGru> grus_;
  std::unique_ptr<nn::Linear> bott_, out_;
};

/// Online-trained predictor: embedding plus learned positions, one
/// last-position multi-head attention block, a feed-forward block, and a
/// vocab-sized head.
class AttentionModel {
public:
  AttentionModel(const ModelDims& dims, uint64_t init_seed);

  const ModelDims& dims() const { return dims_; }

  struct Tape {
    Tensor x;        // embedded input after position add, [rows, steps, embed]
    nn::Attention::Tape att;
    Tensor att_out;
    nn::Ffn::Tape ffn;
    Tensor ffn_out;
    std::vector<uint32_t> contexts;
    int64_t rows = 0;
    uint64_t version = 0;
  };

  void forward(const uint32_t* contexts, int64_t rows, int64_t steps, Tape& tape,
               Tensor& logits) const;
  void backward(const Tape& tape, const Tensor& dlogits);
  void predict(const uint32_t* contexts, int64_t rows, int64_t steps, Tensor& logits) const;

  std::vector<nn::Param*> params() { return ps_.all(); }
  std::vector<const nn::Param*> params() const { return ps_.all(); }
  nn::ParamSet& param_set() { return ps_; }

private:
  ModelDims dims_;
  nn::ParamSet ps_;
  nn::Embedding emb_;
  nn::PositionalEmbedding pos_;
  nn::Attention att_;
  nn::Ffn ffn_;
  nn::Linear head_;
};

/// Serialized model: magic, layer count, dims, then the parameter section
/// with its own checksum.
ByteVec serialize_model(const BiGruModel& m);
std::unique_ptr<BiGruModel> deserialize_model(ByteSpan bytes);

/// Private model initialization: embedding and first recurrent layer copied
/// from the public model, head layers freshly seeded.
std::unique_ptr<BiGruModel> derive_private_init(const BiGruModel& pub, uint64_t seed);

} // namespace pmklc
