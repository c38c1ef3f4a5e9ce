#pragma once

#include <string>

#include "pmklc/bytes.hpp"

namespace pmklc {

/// Whole-file read/write; both raise IoError with the path in the message.
ByteVec read_file(const std::string& path);
void write_file(const std::string& path, ByteSpan bytes);

} // namespace pmklc
