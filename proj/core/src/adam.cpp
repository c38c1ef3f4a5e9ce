#include "pmklc/adam.hpp"

#include <cmath>

#include "pmklc/error.hpp"

namespace pmklc::nn {

void Adam::attach(const std::vector<Param*>& params) {
  step_ = 0;
  beta1_pow_ = 1.0f;
  beta2_pow_ = 1.0f;
  m_.clear();
  v_.clear();
  for (const Param* p : params) {
    m_.emplace_back(p->value.shape);
    v_.emplace_back(p->value.shape);
  }
}

void Adam::step(const std::vector<Param*>& params) {
  if (params.size() != m_.size()) raise(errc::shape_mismatch, "optimizer not attached to these parameters");
  step_ += 1;
  beta1_pow_ *= cfg_.beta1;
  beta2_pow_ *= cfg_.beta2;
  const float bc1 = 1.0f - beta1_pow_;
  const float bc2 = 1.0f - beta2_pow_;
  for (size_t i = 0; i < params.size(); ++i) {
    Param& p = *params[i];
    float* m = m_[i].ptr();
    float* v = v_[i].ptr();
    float* w = p.value.ptr();
    const float* g = p.grad.ptr();
    const size_t n = p.value.data.size();
    for (size_t j = 0; j < n; ++j) {
      m[j] = cfg_.beta1 * m[j] + (1.0f - cfg_.beta1) * g[j];
      v[j] = cfg_.beta2 * v[j] + (1.0f - cfg_.beta2) * g[j] * g[j];
      const float mhat = m[j] / bc1;
      const float vhat = v[j] / bc2;
      w[j] -= cfg_.lr * mhat / (std::sqrt(vhat) + cfg_.eps);
    }
  }
}

void Adam::serialize(ByteWriter& w) const {
  w.u64(step_);
  w.f32(beta1_pow_);
  w.f32(beta2_pow_);
  w.u32(uint32_t(m_.size()));
  for (size_t i = 0; i < m_.size(); ++i) {
    w.u64(uint64_t(m_[i].data.size()));
    for (float f : m_[i].data) w.f32(f);
    for (float f : v_[i].data) w.f32(f);
  }
}

void Adam::deserialize(ByteReader& r, const std::vector<Param*>& params) {
  attach(params);
  step_ = r.u64();
  beta1_pow_ = r.f32();
  beta2_pow_ = r.f32();
  const uint32_t count = r.u32();
  if (count != params.size()) raise(errc::shape_mismatch, "optimizer state parameter count");
  for (size_t i = 0; i < params.size(); ++i) {
    const uint64_t n = r.u64();
    if (n != params[i]->value.data.size()) raise(errc::shape_mismatch, "optimizer state tensor size");
    for (uint64_t j = 0; j < n; ++j) m_[i].data[size_t(j)] = r.f32();
    for (uint64_t j = 0; j < n; ++j) v_[i].data[size_t(j)] = r.f32();
  }
}

} // namespace pmklc::nn
