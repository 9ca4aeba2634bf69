#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace iconrag {

/// Lowercases and splits on every non-word code point. No stemming, no
/// stop words.
std::vector<std::string> tokenize(std::string_view text);

/// Tokens of `text` with duplicates removed, keeping first occurrences.
std::vector<std::string> unique_terms(std::string_view text);

}  // namespace iconrag
