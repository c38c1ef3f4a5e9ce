#include "pmklc/io.hpp"

#include <cstdio>

#include "pmklc/error.hpp"

namespace pmklc {

ByteVec read_file(const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "rb");
  if (!f) raise(errc::io_error, "cannot open " + path);
  std::fseek(f, 0, SEEK_END);
  const long n = std::ftell(f);
  if (n < 0) {
    std::fclose(f);
    raise(errc::io_error, "cannot size " + path);
  }
  std::fseek(f, 0, SEEK_SET);
  ByteVec out(static_cast<size_t>(n));
  const size_t got = n ? std::fread(out.data(), 1, size_t(n), f) : 0;
  std::fclose(f);
  if (got != size_t(n)) raise(errc::io_error, "short read on " + path);
  return out;
}

void write_file(const std::string& path, ByteSpan bytes) {
  std::FILE* f = std::fopen(path.c_str(), "wb");
  if (!f) raise(errc::io_error, "cannot create " + path);
  const size_t put = bytes.empty() ? 0 : std::fwrite(bytes.data(), 1, bytes.size(), f);
  const bool ok = (put == bytes.size()) && std::fclose(f) == 0;
  if (!ok) raise(errc::io_error, "short write on " + path);
}

} // namespace pmklc
