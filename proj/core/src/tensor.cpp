#include "pmklc/tensor.hpp"

namespace pmklc {

void matmul_acc(const float* a, const float* b, float* c, int64_t m, int64_t k, int64_t n) {
  for (int64_t i = 0; i < m; ++i) {
    const float* arow = a + i * k;
    float* crow = c + i * n;
    for (int64_t p = 0; p < k; ++p) {
      const float av = arow[p];
      const float* brow = b + p * n;
      for (int64_t j = 0; j < n; ++j) crow[j] += av * brow[j];
    }
  }
}

void matmul_acc_at(const float* a, const float* b, float* c, int64_t m, int64_t k, int64_t n) {
  for (int64_t p = 0; p < k; ++p) {
    const float* arow = a + p * m;
    const float* brow = b + p * n;
    for (int64_t i = 0; i < m; ++i) {
      const float av = arow[i];
      float* crow = c + i * n;
      for (int64_t j = 0; j < n; ++j) crow[j] += av * brow[j];
    }
  }
}

void linear_forward(const float* x, const float* w, const float* bias, float* out, int64_t rows,
                    int64_t k, int64_t n) {
  for (int64_t i = 0; i < rows; ++i) {
    float* orow = out + i * n;
    for (int64_t j = 0; j < n; ++j) orow[j] = bias[j];
  }
  matmul_acc(x, w, out, rows, k, n);
}

} // namespace pmklc
