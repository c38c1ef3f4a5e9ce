#include "pmklc/container.hpp"

#include <cstring>

#include "pmklc/error.hpp"

namespace pmklc {

namespace {
constexpr char kMagic[4] = {'P', 'M', 'K', 'L'};

// fixed header + chunk count, before the variable sections
constexpr size_t kHeaderSize = 4 + 1 + 1 + 1 + 1 + 2 + 4 + 2 + 8 + 8 + 8 + 8 + 4;
constexpr size_t kChunkEntrySize = 8 + 8 + 8 + 8 + 4;

void write_packed_bases(ByteWriter& w, const std::vector<uint8_t>& bases) {
  w.u64(bases.size());
  uint8_t cur = 0;
  int fill = 0;
  for (uint8_t b : bases) {
    cur |= uint8_t((b & 3) << (2 * fill));
    if (++fill == 4) {
      w.u8(cur);
      cur = 0;
      fill = 0;
    }
  }
  if (fill) w.u8(cur);
}

std::vector<uint8_t> read_packed_bases(ByteReader& r) {
  const uint64_t n = r.u64();
  std::vector<uint8_t> bases;
  bases.resize(size_t(n));
  ByteSpan packed = r.bytes(size_t((n + 3) / 4));
  for (uint64_t i = 0; i < n; ++i) bases[size_t(i)] = (packed[size_t(i / 4)] >> (2 * (i % 4))) & 3;
  return bases;
}
} // namespace

ByteVec write_container(const Container& c) {
  if (c.payloads.size() != c.chunks.size() || c.trailers.size() != c.chunks.size())
    raise(errc::table_inconsistent, "chunk section counts disagree");

  ByteVec out;
  ByteWriter w(out);
  w.bytes(ByteSpan(reinterpret_cast<const uint8_t*>(kMagic), 4));
  w.u8(kContainerVersion);
  w.u8(c.flags);
  w.u8(c.s);
  w.u8(c.k);
  w.u16(c.t);
  w.u32(c.bs);
  w.u16(c.smp_per_myriad);
  w.u64(c.dm_seed);
  w.u64(c.sprm_seed);
  w.u64(c.pub_fingerprint);
  w.u64(c.original_len);
  w.u32(uint32_t(c.chunks.size()));

  // sections between the table and the payloads, sized up front so the table
  // can carry absolute payload offsets
  uint64_t offset = kHeaderSize + c.chunks.size() * kChunkEntrySize;
  offset += 8 + c.private_model.size();
  offset += 8 + c.exceptions.entries.size() * 9;
  offset += 8 + (c.residual.size() + 3) / 4;

  for (size_t i = 0; i < c.chunks.size(); ++i) {
    const ChunkEntry& e = c.chunks[i];
    w.u64(e.token_start);
    w.u64(e.token_len);
    w.u64(offset);
    w.u64(c.payloads[i].size());
    w.u32(uint32_t(c.trailers[i].size()));
    offset += c.payloads[i].size() + c.trailers[i].size();
  }

  w.u64(c.private_model.size());
  w.bytes(c.private_model);
  c.exceptions.serialize(w);
  write_packed_bases(w, c.residual);
  for (size_t i = 0; i < c.chunks.size(); ++i) {
    w.bytes(c.payloads[i]);
    w.bytes(c.trailers[i]);
  }
  w.u64(fnv1a64(out));
  return out;
}

Container read_container(ByteSpan bytes) {
  if (bytes.size() < kHeaderSize + 8) raise(errc::table_inconsistent, "container too small");
  {
    ByteSpan body = bytes.subspan(0, bytes.size() - 8);
    ByteReader tail(bytes.subspan(bytes.size() - 8));
    if (fnv1a64(body) != tail.u64()) raise(errc::checksum_mismatch, "container checksum");
  }

  ByteReader r(bytes);
  ByteSpan magic = r.bytes(4);
  if (std::memcmp(magic.data(), kMagic, 4) != 0) raise(errc::bad_magic, "container magic");
  if (r.u8() != kContainerVersion) raise(errc::unsupported_version, "container version");

  Container c;
  c.flags = r.u8();
  c.s = r.u8();
  c.k = r.u8();
  c.t = r.u16();
  c.bs = r.u32();
  c.smp_per_myriad = r.u16();
  c.dm_seed = r.u64();
  c.sprm_seed = r.u64();
  c.pub_fingerprint = r.u64();
  c.original_len = r.u64();
  const uint32_t chunk_count = r.u32();
  if (uint64_t(chunk_count) * kChunkEntrySize > bytes.size())
    raise(errc::table_inconsistent, "chunk count exceeds file size");

  c.chunks.resize(chunk_count);
  uint64_t next_token = 0;
  for (ChunkEntry& e : c.chunks) {
    e.token_start = r.u64();
    e.token_len = r.u64();
    e.payload_offset = r.u64();
    e.payload_len = r.u64();
    e.trailer_len = r.u32();
    if (e.token_start != next_token) raise(errc::table_inconsistent, "chunk token ranges not contiguous");
    next_token += e.token_len;
  }

  const uint64_t model_len = r.u64();
  if (model_len > r.remaining()) raise(errc::table_inconsistent, "private model length");
  ByteSpan model = r.bytes(size_t(model_len));
  c.private_model.assign(model.begin(), model.end());
  c.exceptions = ExceptionChannel::deserialize(r);
  c.residual = read_packed_bases(r);

  for (size_t i = 0; i < c.chunks.size(); ++i) {
    const ChunkEntry& e = c.chunks[i];
    if (e.payload_offset != r.pos()) raise(errc::table_inconsistent, "payload offset");
    if (e.payload_len + e.trailer_len > r.remaining())
      raise(errc::table_inconsistent, "payload length");
    ByteSpan p = r.bytes(size_t(e.payload_len));
    c.payloads.emplace_back(p.begin(), p.end());
    ByteSpan t = r.bytes(e.trailer_len);
    c.trailers.emplace_back(t.begin(), t.end());
  }
  if (r.remaining() != 8) raise(errc::table_inconsistent, "trailing bytes after payloads");
  return c;
}

} // namespace pmklc
