#include "pmklc/detmath.hpp"

#include <cmath>
#include <cstdint>
#include <cstring>
#include <limits>

static_assert(std::numeric_limits<float>::is_iec559, "IEEE-754 float required");

namespace pmklc {

namespace {

inline float ldexp_int(float x, int n) {
  // n is kept within [-126, 127] by the callers' argument clamps.
  uint32_t bits = uint32_t(n + 127) << 23;
  float scale;
  std::memcpy(&scale, &bits, 4);
  return x * scale;
}

} // namespace

float det_exp(float x) {
  // Argument reduction x = n*ln2 + f, |f| <= ln2/2, then a degree-6
  // Taylor polynomial for e^f. Max observed error ~1 ulp over [-87, 87].
  if (x > 87.0f) x = 87.0f;
  if (x < -87.0f) x = -87.0f;
  float t = x * 1.4426950408889634f;
  float nf = std::floor(t + 0.5f);
  int n = int(nf);
  // ln2 split into an exactly representable head plus tail.
  float f = x - nf * 0.693359375f;
  f = f - nf * -2.12194440e-4f;
  float p = 1.0f / 720.0f;
  p = p * f + 1.0f / 120.0f;
  p = p * f + 1.0f / 24.0f;
  p = p * f + 1.0f / 6.0f;
  p = p * f + 0.5f;
  p = p * f + 1.0f;
  p = p * f + 1.0f;
  return ldexp_int(p, n);
}

float det_log(float x) {
  // log(m * 2^e) = e*ln2 + 2*atanh((m-1)/(m+1)), m normalized to
  // [sqrt(1/2), sqrt(2)) so |u| stays small.
  if (x < 1.17549435e-38f) x = 1.17549435e-38f; // clamp to FLT_MIN; domain is x > 0
  uint32_t bits;
  std::memcpy(&bits, &x, 4);
  int e = int(bits >> 23) - 127;
  bits = (bits & 0x007fffffu) | 0x3f800000u; // mantissa in [1, 2)
  float m;
  std::memcpy(&m, &bits, 4);
  if (m > 1.4142135f) {
    m *= 0.5f;
    e += 1;
  }
  float u = (m - 1.0f) / (m + 1.0f);
  float u2 = u * u;
  float p = 1.0f / 11.0f;
  p = p * u2 + 1.0f / 9.0f;
  p = p * u2 + 1.0f / 7.0f;
  p = p * u2 + 1.0f / 5.0f;
  p = p * u2 + 1.0f / 3.0f;
  p = p * u2 + 1.0f;
  return float(e) * 0.69314718f + 2.0f * u * p;
}

float det_sigmoid(float x) {
  if (x >= 0.0f) {
    return 1.0f / (1.0f + det_exp(-x));
  }
  float e = det_exp(x);
  return e / (1.0f + e);
}

float det_tanh(float x) {
  float a = x < 0.0f ? -x : x;
  if (a > 9.0f) a = 9.0f;
  float t = 1.0f - 2.0f / (det_exp(2.0f * a) + 1.0f);
  return x < 0.0f ? -t : t;
}

void det_softmax(float* v, size_t n) {
  if (n == 0) return;
  float mx = v[0];
  for (size_t i = 1; i < n; ++i)
    if (v[i] > mx) mx = v[i];
  float sum = 0.0f;
  for (size_t i = 0; i < n; ++i) {
    v[i] = det_exp(v[i] - mx);
    sum += v[i];
  }
  float inv = 1.0f / sum;
  for (size_t i = 0; i < n; ++i) v[i] *= inv;
}

void det_softmax(const float* src, float* dst, size_t n) {
  if (dst != src)
    for (size_t i = 0; i < n; ++i) dst[i] = src[i];
  det_softmax(dst, n);
}

} // namespace pmklc
