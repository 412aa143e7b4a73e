#pragma once

#include <string>
#include <string_view>

namespace stance::text {

enum class FallbackEncoding { None, Windows1252 };

/// True when `bytes` is well-formed UTF-8 (no overlongs, surrogates or values above U+10FFFF).
bool is_valid_utf8(std::string_view bytes);

/// Decodes single-byte Windows-1252 into UTF-8. The five unassigned bytes map to U+FFFD.
std::string windows1252_to_utf8(std::string_view bytes);

/// Lowercases ASCII, Latin-1, Latin Extended-A, Greek and Cyrillic letters; every other
/// code point (and any malformed byte) passes through unchanged.
std::string to_lower_utf8(std::string_view utf8);

/// Trims ASCII whitespace from both ends.
std::string_view trim(std::string_view s);

std::string ascii_lower(std::string_view s);

} // namespace stance::text
