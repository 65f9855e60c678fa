#pragma once

#include <string>
#include <string_view>

namespace sreg {

// Writes bytes to path atomically: a temp file in the same directory is
// renamed over the target once fully written.
void atomic_write(const std::string& path, std::string_view bytes);

// Whole-file read into a string; throws data_error when unreadable.
std::string read_text_file(const std::string& path);

}  // namespace sreg
