#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace authentext {

/// Whole-file binary read; Error(io) when the file cannot be opened.
std::string read_file(const std::filesystem::path& path);

/// Binary write, truncating any existing file.
void write_file(const std::filesystem::path& path, std::string_view bytes);

}  // namespace authentext
