#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace authentext::utf8 {

/// Byte offset of the first ill-formed sequence, or nullopt when `bytes` is
/// well-formed UTF-8 (no overlongs, no surrogates, nothing above U+10FFFF).
std::optional<std::size_t> find_invalid(std::string_view bytes) noexcept;

inline bool is_valid(std::string_view bytes) noexcept { return !find_invalid(bytes); }

/// Decodes to Unicode scalar values. Throws Error(parse) on invalid input.
std::u32string decode(std::string_view bytes);

void append(std::string& out, char32_t cp);
std::string encode(char32_t cp);
std::string encode(std::u32string_view cps);

/// Unicode White_Space property.
bool is_space(char32_t cp) noexcept;

/// Maximal runs of non-whitespace code points.
std::vector<std::u32string_view> split_words(std::u32string_view text);

}  // namespace authentext::utf8
