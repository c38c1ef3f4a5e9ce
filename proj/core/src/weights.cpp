#include "pmklc/weights.hpp"

#include <cstring>

#include "pmklc/error.hpp"

namespace pmklc::nn {

namespace {

void append_f32_le(ByteVec& out, const float* data, size_t n) {
  static_assert(sizeof(float) == 4);
  size_t at = out.size();
  out.resize(at + n * 4);
  // little-endian host assumed elsewhere too; bytes.hpp asserts it
  std::memcpy(out.data() + at, data, n * 4);
}

void do_write(const std::vector<const Param*>& params, ByteWriter& w) {
  w.u32(uint32_t(params.size()));
  uint64_t offset = 0;
  for (const Param* p : params) {
    w.str(p->name);
    w.u8(uint8_t(p->value.shape.size()));
    for (int64_t d : p->value.shape) w.u64(uint64_t(d));
    w.u64(offset);
    offset += p->value.data.size() * 4;
  }
  w.u64(offset);
  ByteVec blob;
  blob.reserve(size_t(offset));
  for (const Param* p : params) append_f32_le(blob, p->value.ptr(), p->value.data.size());
  w.bytes(blob);
  w.u64(fnv1a64(blob));
}

} // namespace

void write_params(const std::vector<const Param*>& params, ByteWriter& w) { do_write(params, w); }

void write_params(const std::vector<Param*>& params, ByteWriter& w) {
  std::vector<const Param*> cp(params.begin(), params.end());
  do_write(cp, w);
}

void read_params(const std::vector<Param*>& params, ByteReader& r) {
  const uint32_t count = r.u32();
  if (count != params.size()) raise(errc::architecture_mismatch, "parameter count");
  std::vector<uint64_t> offsets(count);
  for (uint32_t i = 0; i < count; ++i) {
    Param& p = *params[i];
    const std::string name = r.str();
    if (name != p.name) raise(errc::architecture_mismatch, "parameter name " + name);
    const uint8_t rank = r.u8();
    if (rank != p.value.shape.size()) raise(errc::architecture_mismatch, "rank of " + name);
    for (uint8_t d = 0; d < rank; ++d)
      if (r.u64() != uint64_t(p.value.shape[d])) raise(errc::architecture_mismatch, "shape of " + name);
    offsets[i] = r.u64();
  }
  const uint64_t blob_size = r.u64();
  ByteSpan blob = r.bytes(size_t(blob_size));
  const uint64_t want = r.u64();
  if (fnv1a64(blob) != want) raise(errc::checksum_mismatch, "weight blob checksum");
  for (uint32_t i = 0; i < count; ++i) {
    Param& p = *params[i];
    const uint64_t need = p.value.data.size() * 4;
    if (offsets[i] + need > blob_size) raise(errc::architecture_mismatch, "offset of " + p.name);
    std::memcpy(p.value.ptr(), blob.data() + offsets[i], size_t(need));
  }
}

uint64_t params_hash(const std::vector<const Param*>& params) {
  uint64_t h = 0xcbf29ce484222325ull;
  for (const Param* p : params) {
    ByteVec bytes;
    append_f32_le(bytes, p->value.ptr(), p->value.data.size());
    h = fnv1a64(bytes, h);
  }
  return h;
}

} // namespace pmklc::nn
