#pragma once

#include <cstdint>
#include <vector>

#include "pmklc/bytes.hpp"
#include "pmklc/layers.hpp"

namespace pmklc::nn {

struct AdamConfig {
  float lr = 5e-4f;
  float beta1 = 0.9f;
  float beta2 = 0.999f;
  float eps = 1e-8f;
};

/// First/second moment state is kept per parameter in attach() order. The
/// decay powers are carried as running products so a restored snapshot
/// continues bit-identically.
class Adam {
public:
  explicit Adam(AdamConfig cfg = {}) : cfg_(cfg) {}

  void attach(const std::vector<Param*>& params);
  void step(const std::vector<Param*>& params);
  uint64_t steps() const { return step_; }
  const AdamConfig& config() const { return cfg_; }

  void serialize(ByteWriter& w) const;
  void deserialize(ByteReader& r, const std::vector<Param*>& params);

private:
  AdamConfig cfg_;
  uint64_t step_ = 0;
  float beta1_pow_ = 1.0f;
  float beta2_pow_ = 1.0f;
  std::vector<Tensor> m_, v_;
};

} // namespace pmklc::nn
