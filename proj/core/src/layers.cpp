#include "pmklc/layers.hpp"

#include <cassert>
#include <cmath>

#include "pmklc/detmath.hpp"

namespace pmklc::nn {

namespace {

// copy step t of [rows, steps, width] into a contiguous [rows, width] buffer
void gather_step(const Tensor& x, int64_t t, Tensor& out) {
  const int64_t rows = x.dim(0), steps = x.dim(1), w = x.dim(2);
  for (int64_t r = 0; r < rows; ++r) {
    const float* src = x.ptr() + (r * steps + t) * w;
    std::copy(src, src + w, out.ptr() + r * w);
  }
}

void scatter_step(const Tensor& src, int64_t t, Tensor& x) {
  const int64_t rows = x.dim(0), steps = x.dim(1), w = x.dim(2);
  for (int64_t r = 0; r < rows; ++r)
    std::copy(src.ptr() + r * w, src.ptr() + (r + 1) * w, x.ptr() + (r * steps + t) * w);
}

void scatter_add_step(const Tensor& src, int64_t t, Tensor& x) {
  const int64_t rows = x.dim(0), steps = x.dim(1), w = x.dim(2);
  for (int64_t r = 0; r < rows; ++r) {
    float* dst = x.ptr() + (r * steps + t) * w;
    const float* s = src.ptr() + r * w;
    for (int64_t j = 0; j < w; ++j) dst[j] += s[j];
  }
}

void gather_add_step(const Tensor& x, int64_t t, Tensor& out) {
  const int64_t rows = x.dim(0), steps = x.dim(1), w = x.dim(2);
  for (int64_t r = 0; r < rows; ++r) {
    const float* src = x.ptr() + (r * steps + t) * w;
    float* dst = out.ptr() + r * w;
    for (int64_t j = 0; j < w; ++j) dst[j] += src[j];
  }
}

void add_row_bias(Tensor& x, const Tensor& bias, int64_t rows, int64_t w) {
  for (int64_t r = 0; r < rows; ++r) {
    float* row = x.ptr() + r * w;
    for (int64_t j = 0; j < w; ++j) row[j] += bias.data[size_t(j)];
  }
}

void col_sum_acc(const Tensor& x, int64_t rows, int64_t w, Tensor& acc) {
  for (int64_t r = 0; r < rows; ++r) {
    const float* row = x.ptr() + r * w;
    for (int64_t j = 0; j < w; ++j) acc.data[size_t(j)] += row[j];
  }
}

Tensor transposed(const Tensor& w2d) {
  const int64_t r = w2d.dim(0), c = w2d.dim(1);
  Tensor t({c, r});
  for (int64_t i = 0; i < r; ++i)
    for (int64_t j = 0; j < c; ++j) t.data[size_t(j * r + i)] = w2d.data[size_t(i * c + j)];
  return t;
}

} // namespace

Param* ParamSet::add(std::string name, std::vector<int64_t> shape) {
  params_.push_back(Param{std::move(name), Tensor(shape), Tensor(shape)});
  return &params_.back();
}

std::vector<Param*> ParamSet::all() {
  std::vector<Param*> v;
  v.reserve(params_.size());
  for (auto& p : params_) v.push_back(&p);
  return v;
}

std::vector<const Param*> ParamSet::all() const {
  std::vector<const Param*> v;
  v.reserve(params_.size());
  for (auto& p : params_) v.push_back(&p);
  return v;
}

void ParamSet::zero_grads() {
  for (auto& p : params_) p.grad.zero();
}

void init_uniform(Tensor& t, int64_t fan_in, Rng& rng) {
  const float bound = 1.0f / std::sqrt(float(fan_in));
  for (float& v : t.data) v = rng.next_float(-bound, bound);
}

// ---- Embedding ----

Embedding::Embedding(ParamSet& ps, const std::string& prefix, int64_t vocab, int64_t embed)
    : vocab_(vocab), embed_(embed) {
  table_ = ps.add(prefix + ".table", {vocab, embed});
}

void Embedding::init(Rng& rng) { init_uniform(table_->value, vocab_, rng); }

void Embedding::forward(const uint32_t* tokens, int64_t rows, int64_t steps, Tensor& out) const {
  out = Tensor({rows, steps, embed_});
  for (int64_t r = 0; r < rows; ++r)
    for (int64_t t = 0; t < steps; ++t) {
      const uint32_t tok = tokens[r * steps + t];
      assert(tok < uint32_t(vocab_));
      const float* src = table_->value.ptr() + int64_t(tok) * embed_;
      std::copy(src, src + embed_, out.ptr() + (r * steps + t) * embed_);
    }
}

void Embedding::backward(const uint32_t* tokens, int64_t rows, int64_t steps, const Tensor& dout) {
  for (int64_t r = 0; r < rows; ++r)
    for (int64_t t = 0; t < steps; ++t) {
      const uint32_t tok = tokens[r * steps + t];
      float* dst = table_->grad.ptr() + int64_t(tok) * embed_;
      const float* src = dout.ptr() + (r * steps + t) * embed_;
      for (int64_t j = 0; j < embed_; ++j) dst[j] += src[j];
    }
}

// ---- PositionalEmbedding ----

PositionalEmbedding::PositionalEmbedding(ParamSet& ps, const std::string& prefix, int64_t steps,
                                         int64_t embed)
    : steps_(steps), embed_(embed) {
  table_ = ps.add(prefix + ".table", {steps, embed});
}

void PositionalEmbedding::init(Rng& rng) { init_uniform(table_->value, steps_, rng); }

void PositionalEmbedding::forward(Tensor& x) const {
  const int64_t rows = x.dim(0);
  for (int64_t r = 0; r < rows; ++r)
    for (int64_t t = 0; t < steps_; ++t) {
      float* dst = x.ptr() + (r * steps_ + t) * embed_;
      const float* src = table_->value.ptr() + t * embed_;
      for (int64_t j = 0; j < embed_; ++j) dst[j] += src[j];
    }
}

void PositionalEmbedding::backward(const Tensor& dout) {
  const int64_t rows = dout.dim(0);
  for (int64_t r = 0; r < rows; ++r)
    for (int64_t t = 0; t < steps_; ++t) {
      float* dst = table_->grad.ptr() + t * embed_;
      const float* src = dout.ptr() + (r * steps_ + t) * embed_;
      for (int64_t j = 0; j < embed_; ++j) dst[j] += src[j];
    }
}

// ---- Linear ----

Linear::Linear(ParamSet& ps, const std::string& prefix, int64_t in, int64_t out)
    : in_(in), out_(out) {
  w_ = ps.add(prefix + ".w", {in, out});
  b_ = ps.add(prefix + ".b", {out});
}

void Linear::init(Rng& rng) {
  init_uniform(w_->value, in_, rng);
  init_uniform(b_->value, in_, rng);
}

void Linear::forward(const Tensor& x, Tensor& out) const {
  const int64_t rows = x.size() / in_;
  assert(out.size() == rows * out_);
  linear_forward(x.ptr(), w_->value.ptr(), b_->value.ptr(), out.ptr(), rows, in_, out_);
}

void Linear::backward(const Tensor& x, const Tensor& dout, Tensor& dx) {
  const int64_t rows = x.size() / in_;
  matmul_acc_at(x.ptr(), dout.ptr(), w_->grad.ptr(), in_, rows, out_);
  col_sum_acc(dout, rows, out_, b_->grad);
  const Tensor wt = transposed(w_->value);
  assert(dx.size() == rows * in_);
  matmul_acc(dout.ptr(), wt.ptr(), dx.ptr(), rows, out_, in_);
}

// ---- Gru ----

Gru::Gru(ParamSet& ps, const std::string& prefix, int64_t in, int64_t hidden)
    : in_(in), hidden_(hidden) {
  w_ir_ = ps.add(prefix + ".w_ir", {in, hidden});
  w_iz_ = ps.add(prefix + ".w_iz", {in, hidden});
  w_in_ = ps.add(prefix + ".w_in", {in, hidden});
  w_hr_ = ps.add(prefix + ".w_hr", {hidden, hidden});
  w_hz_ = ps.add(prefix + ".w_hz", {hidden, hidden});
  w_hn_ = ps.add(prefix + ".w_hn", {hidden, hidden});
  b_ir_ = ps.add(prefix + ".b_ir", {hidden});
  b_iz_ = ps.add(prefix + ".b_iz", {hidden});
  b_in_ = ps.add(prefix + ".b_in", {hidden});
  b_hr_ = ps.add(prefix + ".b_hr", {hidden});
  b_hz_ = ps.add(prefix + ".b_hz", {hidden});
  b_hn_ = ps.add(prefix + ".b_hn", {hidden});
}

void Gru::init(Rng& rng) {
  init_uniform(w_ir_->value, in_, rng);
  init_uniform(w_iz_->value, in_, rng);
  init_uniform(w_in_->value, in_, rng);
  init_uniform(w_hr_->value, hidden_, rng);
  init_uniform(w_hz_->value, hidden_, rng);
  init_uniform(w_hn_->value, hidden_, rng);
  // biases stay zero
}

void Gru::forward(const Tensor& x, Tape& tape) const {
  const int64_t rows = x.dim(0), steps = x.dim(1);
  const int64_t h = hidden_;
  tape.rows = rows;
  tape.steps = steps;
  tape.r = Tensor({rows, steps, h});
  tape.z = Tensor({rows, steps, h});
  tape.n = Tensor({rows, steps, h});
  tape.hh = Tensor({rows, steps, h});
  tape.out = Tensor({rows, steps, h});

  Tensor xt({rows, in_});
  Tensor hprev({rows, h});
  Tensor ar({rows, h}), az({rows, h}), an({rows, h}), hhb({rows, h});
  const int64_t nh = rows * h;

  for (int64_t t = 0; t < steps; ++t) {
    gather_step(x, t, xt);
    linear_forward(xt.ptr(), w_ir_->value.ptr(), b_ir_->value.ptr(), ar.ptr(), rows, in_, h);
    add_row_bias(ar, b_hr_->value, rows, h);
    matmul_acc(hprev.ptr(), w_hr_->value.ptr(), ar.ptr(), rows, h, h);
    linear_forward(xt.ptr(), w_iz_->value.ptr(), b_iz_->value.ptr(), az.ptr(), rows, in_, h);
    add_row_bias(az, b_hz_->value, rows, h);
    matmul_acc(hprev.ptr(), w_hz_->value.ptr(), az.ptr(), rows, h, h);
    linear_forward(hprev.ptr(), w_hn_->value.ptr(), b_hn_->value.ptr(), hhb.ptr(), rows, h, h);
    linear_forward(xt.ptr(), w_in_->value.ptr(), b_in_->value.ptr(), an.ptr(), rows, in_, h);

    float* rp = tape.r.ptr();
    float* zp = tape.z.ptr();
    float* np = tape.n.ptr();
    float* hhp = tape.hh.ptr();
    for (int64_t i = 0; i < nh; ++i) {
      const int64_t row = i / h, j = i % h;
      const int64_t at = (row * steps + t) * h + j;
      const float rv = det_sigmoid(ar.data[size_t(i)]);
      const float zv = det_sigmoid(az.data[size_t(i)]);
      const float hhv = hhb.data[size_t(i)];
      const float nv = det_tanh(an.data[size_t(i)] + rv * hhv);
      const float hv = (1.0f - zv) * nv + zv * hprev.data[size_t(i)];
      rp[at] = rv;
      zp[at] = zv;
      np[at] = nv;
      hhp[at] = hhv;
      tape.out.ptr()[at] = hv;
      hprev.data[size_t(i)] = hv;
    }
  }
}

void Gru::backward(const Tensor& x, const Tape& tape, const Tensor& dout, Tensor& dx) {
  const int64_t rows = tape.rows, steps = tape.steps, h = hidden_;
  const Tensor w_inT = transposed(w_in_->value);
  const Tensor w_irT = transposed(w_ir_->value);
  const Tensor w_izT = transposed(w_iz_->value);
  const Tensor w_hnT = transposed(w_hn_->value);
  const Tensor w_hrT = transposed(w_hr_->value);
  const Tensor w_hzT = transposed(w_hz_->value);

  Tensor dh({rows, h}), dh_next({rows, h});
  Tensor dan({rows, h}), dar({rows, h}), daz({rows, h}), dhh({rows, h});
  Tensor xt({rows, in_}), hprev({rows, h}), dxt({rows, in_});
  const int64_t nh = rows * h;

  for (int64_t t = steps - 1; t >= 0; --t) {
    gather_step(x, t, xt);
    if (t == 0)
      hprev.zero();
    else
      gather_step(tape.out, t - 1, hprev);
    gather_add_step(dout, t, dh);

    for (int64_t i = 0; i < nh; ++i) {
      const int64_t row = i / h, j = i % h;
      const int64_t at = (row * steps + t) * h + j;
      const float rv = tape.r.ptr()[at];
      const float zv = tape.z.ptr()[at];
      const float nv = tape.n.ptr()[at];
      const float hhv = tape.hh.ptr()[at];
      const float dhv = dh.data[size_t(i)];
      const float dzv = dhv * (hprev.data[size_t(i)] - nv);
      const float danv = dhv * (1.0f - zv) * (1.0f - nv * nv);
      dan.data[size_t(i)] = danv;
      dar.data[size_t(i)] = danv * hhv * rv * (1.0f - rv);
      daz.data[size_t(i)] = dzv * zv * (1.0f - zv);
      dhh.data[size_t(i)] = danv * rv;
      dh_next.data[size_t(i)] = dhv * zv;
    }

    dxt.zero();
    matmul_acc(dan.ptr(), w_inT.ptr(), dxt.ptr(), rows, h, in_);
    matmul_acc(dar.ptr(), w_irT.ptr(), dxt.ptr(), rows, h, in_);
    matmul_acc(daz.ptr(), w_izT.ptr(), dxt.ptr(), rows, h, in_);
    scatter_add_step(dxt, t, dx);

    matmul_acc(dhh.ptr(), w_hnT.ptr(), dh_next.ptr(), rows, h, h);
    matmul_acc(dar.ptr(), w_hrT.ptr(), dh_next.ptr(), rows, h, h);
    matmul_acc(daz.ptr(), w_hzT.ptr(), dh_next.ptr(), rows, h, h);

    matmul_acc_at(xt.ptr(), dan.ptr(), w_in_->grad.ptr(), in_, rows, h);
    matmul_acc_at(xt.ptr(), dar.ptr(), w_ir_->grad.ptr(), in_, rows, h);
    matmul_acc_at(xt.ptr(), daz.ptr(), w_iz_->grad.ptr(), in_, rows, h);
    matmul_acc_at(hprev.ptr(), dhh.ptr(), w_hn_->grad.ptr(), h, rows, h);
    matmul_acc_at(hprev.ptr(), dar.ptr(), w_hr_->grad.ptr(), h, rows, h);
    matmul_acc_at(hprev.ptr(), daz.ptr(), w_hz_->grad.ptr(), h, rows, h);
    col_sum_acc(dan, rows, h, b_in_->grad);
    col_sum_acc(dar, rows, h, b_ir_->grad);
    col_sum_acc(daz, rows, h, b_iz_->grad);
    col_sum_acc(dhh, rows, h, b_hn_->grad);
    col_sum_acc(dar, rows, h, b_hr_->grad);
    col_sum_acc(daz, rows, h, b_hz_->grad);

    std::swap(dh, dh_next);
    dh_next.zero();
  }
}

// ---- BiGru ----

namespace {
Tensor reverse_steps(const Tensor& x) {
  const int64_t rows = x.dim(0), steps = x.dim(1), w = x.dim(2);
  Tensor out({rows, steps, w});
  for (int64_t r = 0; r < rows; ++r)
    for (int64_t t = 0; t < steps; ++t) {
      const float* src = x.ptr() + (r * steps + t) * w;
      std::copy(src, src + w, out.ptr() + (r * steps + (steps - 1 - t)) * w);
    }
  return out;
}
} // namespace

BiGru::BiGru(ParamSet& ps, const std::string& prefix, int64_t in, int64_t hidden)
    : fwd_(ps, prefix + ".fwd", in, hidden), bwd_(ps, prefix + ".bwd", in, hidden),
      hidden_(hidden) {}

void BiGru::init(Rng& rng) {
  fwd_.init(rng);
  bwd_.init(rng);
}

void BiGru::forward(const Tensor& x, Tape& tape, Tensor& out) const {
  const int64_t rows = x.dim(0), steps = x.dim(1), h = hidden_;
  fwd_.forward(x, tape.fwd);
  tape.x_rev = reverse_steps(x);
  bwd_.forward(tape.x_rev, tape.bwd);
  out = Tensor({rows, steps, 2 * h});
  for (int64_t r = 0; r < rows; ++r)
    for (int64_t t = 0; t < steps; ++t) {
      float* dst = out.ptr() + (r * steps + t) * 2 * h;
      const float* f = tape.fwd.out.ptr() + (r * steps + t) * h;
      const float* b = tape.bwd.out.ptr() + (r * steps + (steps - 1 - t)) * h;
      std::copy(f, f + h, dst);
      std::copy(b, b + h, dst + h);
    }
}

void BiGru::backward(const Tensor& x, const Tape& tape, const Tensor& dout, Tensor& dx) {
  const int64_t rows = dout.dim(0), steps = dout.dim(1), h = hidden_;
  Tensor dfwd({rows, steps, h}), dbwd({rows, steps, h});
  for (int64_t r = 0; r < rows; ++r)
    for (int64_t t = 0; t < steps; ++t) {
      const float* src = dout.ptr() + (r * steps + t) * 2 * h;
      std::copy(src, src + h, dfwd.ptr() + (r * steps + t) * h);
      std::copy(src + h, src + 2 * h, dbwd.ptr() + (r * steps + (steps - 1 - t)) * h);
    }
  fwd_.backward(x, tape.fwd, dfwd, dx);
  Tensor dx_rev({dx.dim(0), dx.dim(1), dx.dim(2)});
  bwd_.backward(tape.x_rev, tape.bwd, dbwd, dx_rev);
  for (int64_t r = 0; r < rows; ++r)
    for (int64_t t = 0; t < steps; ++t) {
      float* dst = dx.ptr() + (r * steps + t) * dx.dim(2);
      const float* src = dx_rev.ptr() + (r * steps + (steps - 1 - t)) * dx.dim(2);
      for (int64_t j = 0; j < dx.dim(2); ++j) dst[j] += src[j];
    }
}

void BiGru::final_state(const Tape& tape, Tensor& out) {
  const int64_t rows = tape.fwd.rows, steps = tape.fwd.steps;
  const int64_t h = tape.fwd.out.dim(2);
  out = Tensor({rows, 2 * h});
  for (int64_t r = 0; r < rows; ++r) {
    const float* f = tape.fwd.out.ptr() + (r * steps + (steps - 1)) * h;
    const float* b = tape.bwd.out.ptr() + (r * steps + (steps - 1)) * h;
    std::copy(f, f + h, out.ptr() + r * 2 * h);
    std::copy(b, b + h, out.ptr() + r * 2 * h + h);
  }
}

void BiGru::final_state_backward(const Tensor& dfinal, Tensor& dout) {
  // fwd final state sits at concat position (steps-1, first half); bwd final
  // state was written to concat position (0, second half)
  const int64_t rows = dout.dim(0), steps = dout.dim(1);
  const int64_t h = dout.dim(2) / 2;
  for (int64_t r = 0; r < rows; ++r) {
    float* last = dout.ptr() + (r * steps + (steps - 1)) * 2 * h;
    float* first = dout.ptr() + (r * steps) * 2 * h;
    const float* src = dfinal.ptr() + r * 2 * h;
    for (int64_t j = 0; j < h; ++j) last[j] += src[j];
    for (int64_t j = 0; j < h; ++j) first[h + j] += src[h + j];
  }
}

// ---- Attention ----

Attention::Attention(ParamSet& ps, const std::string& prefix, int64_t in, int64_t width,
                     int64_t heads)
    : wq_(ps, prefix + ".q", in, width), wk_(ps, prefix + ".k", in, width),
      wv_(ps, prefix + ".v", in, width), wo_(ps, prefix + ".o", width, width), in_(in),
      width_(width), heads_(heads), head_dim_(width / heads) {
  assert(width % heads == 0);
}

void Attention::init(Rng& rng) {
  wq_.init(rng);
  wk_.init(rng);
  wv_.init(rng);
  wo_.init(rng);
}

void Attention::forward(const Tensor& x, Tape& tape, Tensor& out) const {
  const int64_t rows = x.dim(0), steps = x.dim(1);
  const int64_t hd = head_dim_;
  tape.rows = rows;
  tape.steps = steps;
  tape.k = Tensor({rows, steps, width_});
  tape.v = Tensor({rows, steps, width_});
  wk_.forward(x, tape.k);
  wv_.forward(x, tape.v);

  Tensor xl({rows, in_});
  gather_step(x, steps - 1, xl);
  tape.q = Tensor({rows, width_});
  wq_.forward(xl, tape.q);

  tape.weights = Tensor({rows, heads_, steps});
  tape.ctx = Tensor({rows, width_});
  const float inv = 1.0f / std::sqrt(float(hd));
  std::vector<float> scores(static_cast<size_t>(steps));
  for (int64_t r = 0; r < rows; ++r) {
    for (int64_t hh = 0; hh < heads_; ++hh) {
      const int64_t base = hh * hd;
      const float* q = tape.q.ptr() + r * width_ + base;
      for (int64_t t = 0; t < steps; ++t) {
        const float* k = tape.k.ptr() + (r * steps + t) * width_ + base;
        float s = 0.0f;
        for (int64_t d = 0; d < hd; ++d) s += q[d] * k[d];
        scores[size_t(t)] = s * inv;
      }
      float* w = tape.weights.ptr() + (r * heads_ + hh) * steps;
      det_softmax(scores.data(), w, size_t(steps));
      float* c = tape.ctx.ptr() + r * width_ + base;
      for (int64_t t = 0; t < steps; ++t) {
        const float* v = tape.v.ptr() + (r * steps + t) * width_ + base;
        const float wt = w[t];
        for (int64_t d = 0; d < hd; ++d) c[d] += wt * v[d];
      }
    }
  }
  assert(out.size() == rows * width_);
  wo_.forward(tape.ctx, out);
}

void Attention::backward(const Tensor& x, const Tape& tape, const Tensor& dout, Tensor& dx) {
  const int64_t rows = tape.rows, steps = tape.steps, hd = head_dim_;
  Tensor dctx({rows, width_});
  wo_.backward(tape.ctx, dout, dctx);

  Tensor dq({rows, width_}), dk({rows, steps, width_}), dv({rows, steps, width_});
  const float inv = 1.0f / std::sqrt(float(hd));
  std::vector<float> dwt(static_cast<size_t>(steps)), ds(static_cast<size_t>(steps));
  for (int64_t r = 0; r < rows; ++r) {
    for (int64_t hh = 0; hh < heads_; ++hh) {
      const int64_t base = hh * hd;
      const float* w = tape.weights.ptr() + (r * heads_ + hh) * steps;
      const float* dc = dctx.ptr() + r * width_ + base;
      for (int64_t t = 0; t < steps; ++t) {
        const float* v = tape.v.ptr() + (r * steps + t) * width_ + base;
        float* dvp = dv.ptr() + (r * steps + t) * width_ + base;
        float acc = 0.0f;
        const float wt = w[t];
        for (int64_t d = 0; d < hd; ++d) {
          dvp[d] += wt * dc[d];
          acc += dc[d] * v[d];
        }
        dwt[size_t(t)] = acc;
      }
      float dot = 0.0f;
      for (int64_t t = 0; t < steps; ++t) dot += w[t] * dwt[size_t(t)];
      for (int64_t t = 0; t < steps; ++t) ds[size_t(t)] = w[t] * (dwt[size_t(t)] - dot) * inv;
      const float* q = tape.q.ptr() + r * width_ + base;
      float* dqp = dq.ptr() + r * width_ + base;
      for (int64_t t = 0; t < steps; ++t) {
        const float* k = tape.k.ptr() + (r * steps + t) * width_ + base;
        float* dkp = dk.ptr() + (r * steps + t) * width_ + base;
        const float dsv = ds[size_t(t)];
        for (int64_t d = 0; d < hd; ++d) {
          dqp[d] += dsv * k[d];
          dkp[d] += dsv * q[d];
        }
      }
    }
  }

  wk_.backward(x, dk, dx);
  wv_.backward(x, dv, dx);
  Tensor xl({rows, in_}), dxl({rows, in_});
  gather_step(x, steps - 1, xl);
  wq_.backward(xl, dq, dxl);
  scatter_add_step(dxl, steps - 1, dx);
}

// ---- Ffn ----

Ffn::Ffn(ParamSet& ps, const std::string& prefix, int64_t width, int64_t inner)
    : inner_(ps, prefix + ".inner", width, inner), outer_(ps, prefix + ".outer", inner, width) {}

void Ffn::init(Rng& rng) {
  inner_.init(rng);
  outer_.init(rng);
}

void Ffn::forward(const Tensor& x, Tape& tape, Tensor& out) const {
  const int64_t rows = x.size() / inner_.in();
  tape.pre = Tensor({rows, inner_.out()});
  inner_.forward(x, tape.pre);
  tape.act = tape.pre;
  for (float& v : tape.act.data)
    if (v < 0.0f) v = 0.0f;
  outer_.forward(tape.act, out);
}

void Ffn::backward(const Tensor& x, const Tape& tape, const Tensor& dout, Tensor& dx) {
  Tensor dact({tape.act.dim(0), tape.act.dim(1)});
  outer_.backward(tape.act, dout, dact);
  for (size_t i = 0; i < dact.data.size(); ++i)
    if (tape.pre.data[i] <= 0.0f) dact.data[i] = 0.0f;
  inner_.backward(x, dact, dx);
}

} // namespace pmklc::nn
