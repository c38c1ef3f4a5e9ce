#include "pmklc/skmer.hpp"

#include <thread>

#include "pmklc/error.hpp"

namespace pmklc {

uint64_t token_count(uint64_t n, SkParams p) {
  if (n < p.k) return 0;
  return (n - p.k) / p.s + 1;
}

namespace {

void encode_range(const uint8_t* payload, uint32_t* tokens, uint64_t begin, uint64_t end,
                  SkParams p) {
  for (uint64_t j = begin; j < end; ++j) {
    uint32_t v = 0;
    const uint8_t* w = payload + j * p.s;
    for (unsigned i = 0; i < p.k; ++i) v = (v << 2) | w[i];
    tokens[j] = v;
  }
}

} // namespace

TokenSequence encode(const NucleotideStream& stream, SkParams p, unsigned workers) {
  if (!p.valid()) raise(errc::config_invalid, "invalid (s,k) parameters");
  if (workers < 1) workers = 1;

  const uint64_t n = stream.length();
  const uint64_t m = token_count(n, p);

  TokenSequence ts;
  ts.params = p;
  ts.tokens.resize(m);

  if (m > 0) {
    if (workers == 1 || m < 4096) {
      encode_range(stream.payload.data(), ts.tokens.data(), 0, m, p);
    } else {
      // Partition the token index range; windows may overlap in the input but
      // output slots are disjoint, so no stitching is needed.
      std::vector<std::thread> pool;
      uint64_t per = m / workers, rem = m % workers, begin = 0;
      for (unsigned w = 0; w < workers; ++w) {
        uint64_t len = per + (w < rem ? 1 : 0);
        pool.emplace_back(encode_range, stream.payload.data(), ts.tokens.data(), begin,
                          begin + len, p);
        begin += len;
      }
      for (auto& t : pool) t.join();
    }
    uint64_t covered = (m - 1) * p.s + p.k;
    ts.residual.assign(stream.payload.begin() + covered, stream.payload.end());
  } else {
    ts.residual = stream.payload;
  }
  return ts;
}

NucleotideStream decode(const TokenSequence& ts) {
  const SkParams p = ts.params;
  const uint32_t width = p.alphabet_size();
  NucleotideStream out;

  const size_t m = ts.tokens.size();
  if (m > 0) {
    out.payload.reserve((m - 1) * p.s + p.k + ts.residual.size());
    for (size_t j = 0; j < m; ++j) {
      uint32_t tok = ts.tokens[j];
      if (tok >= width) raise(errc::token_out_of_range, "token exceeds 4^k");
      // Emit the first s digits for every window except the last, which
      // contributes all k; the overlap region is owned by the later window.
      unsigned emit = (j + 1 == m) ? p.k : p.s;
      for (unsigned i = 0; i < emit; ++i)
        out.payload.push_back(uint8_t((tok >> (2 * (p.k - 1 - i))) & 3));
    }
  }
  out.payload.insert(out.payload.end(), ts.residual.begin(), ts.residual.end());
  return out;
}

OverlapReport overlap_check(const TokenSequence& ts) {
  const SkParams p = ts.params;
  if (p.s == p.k) raise(errc::not_overlapping, "s == k leaves no shared digits");

  const unsigned shared = p.k - p.s;
  for (size_t j = 0; j + 1 < ts.tokens.size(); ++j) {
    uint32_t a = ts.tokens[j], b = ts.tokens[j + 1];
    for (unsigned i = 0; i < shared; ++i) {
      unsigned digit_a = p.s + i;  // position in window j
      unsigned digit_b = i;        // same base in window j+1
      uint32_t da = (a >> (2 * (p.k - 1 - digit_a))) & 3;
      uint32_t db = (b >> (2 * (p.k - 1 - digit_b))) & 3;
      if (da != db) return {false, j};
    }
  }
  return {true, 0};
}

} // namespace pmklc
