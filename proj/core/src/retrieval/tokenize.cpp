#include "iconrag/retrieval/tokenize.hpp"

#include <unordered_set>

#include "iconrag/util/text.hpp"

namespace iconrag {

std::vector<std::string> tokenize(std::string_view text) {
    std::vector<std::string> tokens;
    std::string current;
    std::size_t pos = 0;
    while (pos < text.size()) {
        const auto cp = next_code_point(text, pos);
        if (cp && is_word_char(*cp)) {
            append_utf8(current, to_lower(*cp));
        } else if (!current.empty()) {
            tokens.push_back(std::move(current));
            current.clear();
        }
    }
    if (!current.empty()) tokens.push_back(std::move(current));
    return tokens;
}

std::vector<std::string> unique_terms(std::string_view text) {
    std::vector<std::string> terms;
    std::unordered_set<std::string> seen;
    for (auto& token : tokenize(text)) {
        if (seen.insert(token).second) terms.push_back(std::move(token));
    }
    return terms;
}

}  // namespace iconrag
