#pragma once

#include <cstdint>
#include <deque>
#include <string>
#include <vector>

#include "pmklc/rng.hpp"
#include "pmklc/tensor.hpp"

namespace pmklc::nn {

using pmklc::Rng;
using pmklc::Tensor;

struct Param {
  std::string name;
  Tensor value;
  Tensor grad;
};

/// Owns a model's parameters. Deque-backed so Param pointers held by layers
/// stay valid as parameters are added. `version` increments on every
/// optimizer step; tapes record it so a stale tape can be rejected.
class ParamSet {
public:
  Param* add(std::string name, std::vector<int64_t> shape);
  std::vector<Param*> all();
  std::vector<const Param*> all() const;
  void zero_grads();
  uint64_t version = 0;

private:
  std::deque<Param> params_;
};

/// Fill with uniform values in [-1/sqrt(fan_in), +1/sqrt(fan_in)].
void init_uniform(Tensor& t, int64_t fan_in, Rng& rng);

/// Token lookup table [vocab, embed].
class Embedding {
public:
  Embedding(ParamSet& ps, const std::string& prefix, int64_t vocab, int64_t embed);
  void init(Rng& rng);
  /// tokens: row-major [rows, steps] -> out [rows, steps, embed]
  void forward(const uint32_t* tokens, int64_t rows, int64_t steps, Tensor& out) const;
  void backward(const uint32_t* tokens, int64_t rows, int64_t steps, const Tensor& dout);
  int64_t vocab() const { return vocab_; }
  int64_t width() const { return embed_; }
  Param* table() { return table_; }

private:
  Param* table_;
  int64_t vocab_, embed_;
};

/// Learned additive position table [steps, embed].
class PositionalEmbedding {
public:
  PositionalEmbedding(ParamSet& ps, const std::string& prefix, int64_t steps, int64_t embed);
  void init(Rng& rng);
  void forward(Tensor& x) const; // in place, x [rows, steps, embed]
  void backward(const Tensor& dout);
  Param* table() { return table_; }

private:
  Param* table_;
  int64_t steps_, embed_;
};

class Linear {
public:
  Linear(ParamSet& ps, const std::string& prefix, int64_t in, int64_t out);
  void init(Rng& rng);
  /// x [rows, in] -> out [rows, out]; rows may be any flattened leading extent
  void forward(const Tensor& x, Tensor& out) const;
  /// needs the forward input; accumulates weight grads, writes dx
  void backward(const Tensor& x, const Tensor& dout, Tensor& dx);
  int64_t in() const { return in_; }
  int64_t out() const { return out_; }
  Param* weight() { return w_; }
  Param* bias() { return b_; }

private:
  Param *w_, *b_;
  int64_t in_, out_;
};

/// Single-direction GRU, gate convention r,z,n with the candidate using
/// r * (h W_hn + b_hn). Biases start at zero.
class Gru {
public:
  Gru(ParamSet& ps, const std::string& prefix, int64_t in, int64_t hidden);
  void init(Rng& rng);

  struct Tape {
    // per step [rows, hidden]: gates and the pre-gated hidden candidate term
    Tensor r, z, n, hh;   // [rows, steps, hidden]
    Tensor out;           // [rows, steps, hidden], h after each step
    int64_t rows = 0, steps = 0;
  };

  /// x [rows, steps, in]; h0 = 0
  void forward(const Tensor& x, Tape& tape) const;
  void backward(const Tensor& x, const Tape& tape, const Tensor& dout, Tensor& dx);
  int64_t hidden() const { return hidden_; }

private:
  Param *w_ir_, *w_iz_, *w_in_;
  Param *w_hr_, *w_hz_, *w_hn_;
  Param *b_ir_, *b_iz_, *b_in_;
  Param *b_hr_, *b_hz_, *b_hn_;
  int64_t in_, hidden_;
};

/// Two GRUs over opposite time directions; outputs concatenated per step.
class BiGru {
public:
  BiGru(ParamSet& ps, const std::string& prefix, int64_t in, int64_t hidden);
  void init(Rng& rng);

  struct Tape {
    Gru::Tape fwd, bwd;
    Tensor x_rev; // input reversed in time, kept for the backward pass
  };

  /// x [rows, steps, in] -> out [rows, steps, 2*hidden]
  void forward(const Tensor& x, Tape& tape, Tensor& out) const;
  void backward(const Tensor& x, const Tape& tape, const Tensor& dout, Tensor& dx);
  /// concat of the two directions' final hidden states -> [rows, 2*hidden]
  static void final_state(const Tape& tape, Tensor& out);
  /// adds dfinal back into the concat-output gradient layout
  static void final_state_backward(const Tensor& dfinal, Tensor& dout);
  int64_t hidden() const { return hidden_; }

private:
  Gru fwd_, bwd_;
  int64_t hidden_;
};

/// Multi-head self-attention where only the last position queries; keys and
/// values cover the whole window. Output is that single position's row.
class Attention {
public:
  Attention(ParamSet& ps, const std::string& prefix, int64_t in, int64_t width, int64_t heads);
  void init(Rng& rng);

  struct Tape {
    Tensor q;      // [rows, width]
    Tensor k, v;   // [rows, steps, width]
    Tensor weights; // [rows, heads, steps]
    Tensor ctx;    // [rows, width]
    int64_t rows = 0, steps = 0;
  };

  /// x [rows, steps, width] -> out [rows, width]
  void forward(const Tensor& x, Tape& tape, Tensor& out) const;
  void backward(const Tensor& x, const Tape& tape, const Tensor& dout, Tensor& dx);
  int64_t width() const { return width_; }

private:
  Linear wq_, wk_, wv_, wo_;
  int64_t in_, width_, heads_, head_dim_;
};

/// Linear -> relu -> Linear.
class Ffn {
public:
  Ffn(ParamSet& ps, const std::string& prefix, int64_t width, int64_t inner);
  void init(Rng& rng);

  struct Tape {
    Tensor pre;  // [rows, inner] before relu
    Tensor act;  // [rows, inner] after relu
  };

  void forward(const Tensor& x, Tape& tape, Tensor& out) const;
  void backward(const Tensor& x, const Tape& tape, const Tensor& dout, Tensor& dx);

private:
  Linear inner_, outer_;
};

} // namespace pmklc::nn
