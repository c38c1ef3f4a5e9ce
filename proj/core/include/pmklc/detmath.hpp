#pragma once

#include <cstddef>

namespace pmklc {

// Transcendental kernels built only from IEEE-754 single-precision +,-,*,/
// in a fixed evaluation order. libm implementations round differently across
// versions, which would silently desynchronize compressor and decompressor;
// these do not.

float det_exp(float x);
float det_log(float x);
float det_sigmoid(float x);
float det_tanh(float x);

/// In-place softmax with max-subtraction, sequential accumulation.
void det_softmax(float* v, size_t n);

/// Out-of-place variant; src and dst may alias.
void det_softmax(const float* src, float* dst, size_t n);

} // namespace pmklc
