#include "pmklc/coder.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <numeric>

#include "pmklc/error.hpp"

namespace pmklc {

namespace {

constexpr uint64_t kRenormBound = uint64_t(1) << 56;

void build_cum(QuantizedDistribution& d) {
  d.cum.resize(d.freqs.size() + 1);
  uint32_t acc = 0;
  for (size_t i = 0; i < d.freqs.size(); ++i) {
    d.cum[i] = acc;
    acc += d.freqs[i];
  }
  d.cum[d.freqs.size()] = acc;
}

} // namespace

QuantizedDistribution quantize(std::span<const float> p) {
  const size_t n = p.size();
  if (n == 0 || n > QuantizedDistribution::kTotal)
    raise(errc::invalid_distribution, "unsupported width");

  double sum = 0.0;
  for (float v : p) {
    if (!(v > 0.0f)) raise(errc::invalid_distribution, "non-positive probability");
    sum += double(v);
  }
  if (std::abs(sum - 1.0) > 1e-5) raise(errc::invalid_distribution, "probabilities do not sum to 1");

  QuantizedDistribution d;
  d.freqs.resize(n);
  // rem[i] = p[i]*2^16 - assigned; clamped entries go negative and thus rank
  // first for removal, last for top-up.
  std::vector<double> rem(n);
  int64_t assigned = 0;
  for (size_t i = 0; i < n; ++i) {
    double v = double(p[i]) * QuantizedDistribution::kTotal;
    uint32_t f = uint32_t(std::max(1.0, std::floor(v)));
    d.freqs[i] = f;
    rem[i] = v - double(f);
    assigned += f;
  }

  int64_t deficit = int64_t(QuantizedDistribution::kTotal) - assigned;
  std::vector<uint32_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  if (deficit > 0) {
    std::stable_sort(order.begin(), order.end(), [&](uint32_t a, uint32_t b) {
      if (rem[a] != rem[b]) return rem[a] > rem[b];
      return a < b;
    });
    size_t idx = 0;
    while (deficit > 0) {
      d.freqs[order[idx]] += 1;
      --deficit;
      idx = (idx + 1) % n;
    }
  } else if (deficit < 0) {
    std::stable_sort(order.begin(), order.end(), [&](uint32_t a, uint32_t b) {
      if (rem[a] != rem[b]) return rem[a] < rem[b];
      return a < b;
    });
    while (deficit < 0) {
      bool removed = false;
      for (size_t idx = 0; idx < n && deficit < 0; ++idx) {
        if (d.freqs[order[idx]] > 1) {
          d.freqs[order[idx]] -= 1;
          ++deficit;
          removed = true;
        }
      }
      if (!removed) raise(errc::invalid_distribution, "cannot settle surplus"); // width > 2^16
    }
  }

  build_cum(d);
  return d;
}

QuantizedDistribution uniform_dist(uint32_t width) {
  if (width == 0 || width > QuantizedDistribution::kTotal)
    raise(errc::invalid_distribution, "unsupported width");
  QuantizedDistribution d;
  d.freqs.assign(width, QuantizedDistribution::kTotal / width);
  uint32_t extra = QuantizedDistribution::kTotal % width;
  for (uint32_t i = 0; i < extra; ++i) d.freqs[i] += 1;
  build_cum(d);
  return d;
}

void RangeEncoder::propagate_carry() {
  size_t i = out_.size();
  for (;;) {
    assert(i > 0 && "carry past the start of the stream");
    out_[i - 1] += 1;
    if (out_[i - 1] != 0) break;
    --i;
  }
}

void RangeEncoder::encode(const QuantizedDistribution& dist, uint32_t symbol) {
  assert(symbol < dist.width());
  const uint64_t rbase = range_ >> 16;
  const uint64_t old_low = low_;
  low_ += rbase * dist.cum[symbol];
  if (low_ < old_low) propagate_carry();
  range_ = rbase * dist.freqs[symbol];
  while (range_ < kRenormBound) {
    out_.push_back(uint8_t(low_ >> 56));
    low_ <<= 8;
    range_ <<= 8;
  }
}

void RangeEncoder::finish() {
  // low itself lies inside the final interval, so emitting it exactly is a
  // valid committed value and never carries.
  for (int i = 0; i < 8; ++i) {
    out_.push_back(uint8_t(low_ >> 56));
    low_ <<= 8;
  }
}

RangeDecoder::RangeDecoder(ByteSpan in) : in_(in) {
  for (int i = 0; i < 8; ++i) code_ = (code_ << 8) | next_byte();
}

uint8_t RangeDecoder::next_byte() {
  if (pos_ >= in_.size()) raise(errc::stream_exhausted, "codestream truncated");
  return in_[pos_++];
}

uint32_t RangeDecoder::decode(const QuantizedDistribution& dist) {
  const uint64_t rbase = range_ >> 16;
  uint64_t target = code_ / rbase;
  if (target >= QuantizedDistribution::kTotal) target = QuantizedDistribution::kTotal - 1;

  // Find the symbol whose [cum, cum+freq) interval holds target.
  uint32_t lo = 0, hi = dist.width();
  while (hi - lo > 1) {
    uint32_t mid = lo + (hi - lo) / 2;
    if (dist.cum[mid] <= target)
      lo = mid;
    else
      hi = mid;
  }
  const uint32_t symbol = lo;

  code_ -= rbase * dist.cum[symbol];
  range_ = rbase * dist.freqs[symbol];
  while (range_ < kRenormBound) {
    code_ = (code_ << 8) | next_byte();
    range_ <<= 8;
  }
  return symbol;
}

} // namespace pmklc
