#pragma once

#include <string>

namespace nevo {

/// Writes via a temp file in the same directory, then renames over the
/// target, so interrupted runs never leave truncated files behind.
void write_file_atomic(const std::string& path, const std::string& content);

std::string read_file(const std::string& path);

} // namespace nevo
