#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace iconrag {

/// Strips ASCII whitespace (space, tab, CR, LF, VT, FF) from both ends.
std::string_view trim(std::string_view text) noexcept;

bool is_valid_utf8(std::string_view text) noexcept;

/// Decodes the code point starting at `pos` and advances `pos` past it.
/// Returns nullopt (and advances one byte) on an invalid sequence.
std::optional<char32_t> next_code_point(std::string_view text, std::size_t& pos) noexcept;

void append_utf8(std::string& out, char32_t cp);

/// Simple case folding for Latin, Greek and Cyrillic letters.
char32_t to_lower(char32_t cp) noexcept;

/// True for code points treated as word characters: ASCII letters and
/// digits, and non-ASCII code points outside the common punctuation,
/// symbol and space blocks.
bool is_word_char(char32_t cp) noexcept;

/// UTF-8 aware lowercasing.
std::string lowercase(std::string_view text);

/// Hex SHA-256 digest of `data`.
std::string sha256_hex(std::string_view data);

std::string base64_encode(std::string_view data);

/// Shortest decimal text that parses back to exactly `value`.
std::string format_double(double value);

/// `value` rounded to `digits` significant decimal digits.
double round_significant(double value, int digits = 12);

}  // namespace iconrag
