#pragma once

#include <cstdint>
#include <initializer_list>
#include <vector>

namespace pmklc {

/// Dense row-major float32 buffer. Rank is small (<= 3 in practice); kernels
/// work on raw pointers, this just keeps shape and storage together.
struct Tensor {
  std::vector<int64_t> shape;
  std::vector<float> data;

  Tensor() = default;
  explicit Tensor(std::initializer_list<int64_t> s) : shape(s) { data.assign(count(shape), 0.0f); }
  explicit Tensor(std::vector<int64_t> s) : shape(std::move(s)) { data.assign(count(shape), 0.0f); }

  static int64_t count(const std::vector<int64_t>& s) {
    int64_t n = 1;
    for (int64_t d : s) n *= d;
    return n;
  }

  int64_t size() const { return int64_t(data.size()); }
  int64_t dim(size_t i) const { return shape[i]; }
  float* ptr() { return data.data(); }
  const float* ptr() const { return data.data(); }
  void zero() { std::fill(data.begin(), data.end(), 0.0f); }

  bool same_shape(const Tensor& o) const { return shape == o.shape; }
};

// Deterministic matmul kernels. Every output element accumulates its partial
// products in ascending-k order regardless of vectorization, which keeps
// results bit-identical across runs and machines.

/// C[M,N] += A[M,K] * B[K,N]
void matmul_acc(const float* a, const float* b, float* c, int64_t m, int64_t k, int64_t n);

/// C[M,N] += A[K,M]^T * B[K,N]
void matmul_acc_at(const float* a, const float* b, float* c, int64_t m, int64_t k, int64_t n);

/// out[R,N] = x[R,K] * w[K,N] + bias[N]
void linear_forward(const float* x, const float* w, const float* bias, float* out, int64_t rows,
                    int64_t k, int64_t n);

} // namespace pmklc
