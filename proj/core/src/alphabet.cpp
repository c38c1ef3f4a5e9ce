#include "pmklc/alphabet.hpp"

#include "pmklc/error.hpp"

namespace pmklc {

int base_code(uint8_t byte) {
  switch (byte) {
    case 'A': return 0;
    case 'C': return 1;
    case 'G': return 2;
    case 'T': return 3;
    default: return -1;
  }
}

uint8_t base_char(uint8_t code) {
  static constexpr uint8_t table[4] = {'A', 'C', 'G', 'T'};
  return table[code & 3];
}

std::pair<NucleotideStream, ExceptionChannel> canonicalize(ByteSpan raw) {
  NucleotideStream stream;
  ExceptionChannel exc;
  stream.payload.reserve(raw.size());
  for (size_t i = 0; i < raw.size(); ++i) {
    int code = base_code(raw[i]);
    if (code >= 0) {
      stream.payload.push_back(uint8_t(code));
    } else {
      exc.entries.push_back({uint64_t(i), raw[i]});
    }
  }
  return {std::move(stream), std::move(exc)};
}

ByteVec restore(const NucleotideStream& stream, const ExceptionChannel& exc, uint64_t original_len) {
  if (stream.payload.size() + exc.entries.size() != original_len)
    raise(errc::length_mismatch, "payload + exceptions do not cover the original length");
  for (const auto& e : exc.entries)
    if (e.position >= original_len)
      raise(errc::length_mismatch, "exception position beyond original length");

  ByteVec out(original_len, 0);
  std::vector<bool> filled(original_len, false);
  for (const auto& e : exc.entries) {
    if (filled[e.position])
      raise(errc::length_mismatch, "duplicate exception position");
    out[e.position] = e.original_byte;
    filled[e.position] = true;
  }
  size_t next = 0;
  for (uint64_t i = 0; i < original_len; ++i) {
    if (filled[i]) continue;
    if (next >= stream.payload.size())
      raise(errc::length_mismatch, "payload shorter than the gaps to fill");
    out[i] = base_char(stream.payload[next++]);
  }
  return out;
}

void ExceptionChannel::serialize(ByteWriter& w) const {
  w.u64(entries.size());
  for (const auto& e : entries) {
    w.u64(e.position);
    w.u8(e.original_byte);
  }
}

ExceptionChannel ExceptionChannel::deserialize(ByteReader& r) {
  ExceptionChannel exc;
  uint64_t n = r.u64();
  exc.entries.reserve(size_t(n));
  uint64_t prev = 0;
  for (uint64_t i = 0; i < n; ++i) {
    Entry e{r.u64(), r.u8()};
    if (i > 0 && e.position <= prev)
      raise(errc::table_inconsistent, "exception positions not strictly increasing");
    prev = e.position;
    exc.entries.push_back(e);
  }
  return exc;
}

} // namespace pmklc
