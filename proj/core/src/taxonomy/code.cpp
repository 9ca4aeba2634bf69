#include "iconrag/taxonomy/code.hpp"

#include <algorithm>

#include "iconrag/error.hpp"
#include "iconrag/util/text.hpp"

namespace iconrag {
namespace {

bool is_digit(char c) { return c >= '0' && c <= '9'; }
bool is_upper(char c) { return c >= 'A' && c <= 'Z'; }
bool is_lower(char c) { return c >= 'a' && c <= 'z'; }

[[noreturn]] void malformed(std::string_view text, std::size_t pos, std::string_view why) {
    throw Error(ErrorCode::MalformedCode,
                "malformed Iconclass code '" + std::string(text) + "' at offset " +
                    std::to_string(pos) + ": " + std::string(why));
}

}  // namespace

IconclassCode IconclassCode::parse(std::string_view input) {
    const std::string_view text = trim(input);
    if (text.empty()) {
        throw Error(ErrorCode::MalformedCode, "empty Iconclass code");
    }
    if (!is_digit(text.front())) {
        malformed(text, 0, "first character must be a digit");
    }

    std::vector<std::string> segments;
    std::string current;
    std::size_t pos = 0;
    while (pos < text.size()) {
        const char c = text[pos];
        if (is_digit(c) || is_upper(c)) {
            current.push_back(c);
            segments.push_back(current);
            ++pos;
            continue;
        }
        if (is_lower(c)) malformed(text, pos, "lowercase letters are not allowed");
        if (c == ')') malformed(text, pos, "unbalanced ')'");
        if (c != '(') malformed(text, pos, "unexpected character");

        const std::size_t close = text.find_first_of("()", pos + 1);
        if (close == std::string_view::npos || text[close] != ')') {
            malformed(text, pos, "unbalanced '('");
        }
        const std::string_view body = text.substr(pos + 1, close - pos - 1);
        if (body.empty()) malformed(text, pos, "empty qualifier");
        for (std::size_t i = 0; i < body.size(); ++i) {
            const char q = body[i];
            if (is_lower(q)) malformed(text, pos + 1 + i, "lowercase letters are not allowed");
            if (static_cast<unsigned char>(q) < 0x20) malformed(text, pos + 1 + i, "control character");
        }

        if (body.front() == '+') {
            const std::string_view keys = body.substr(1);
            if (keys.empty()) malformed(text, pos, "empty key qualifier");
            for (std::size_t i = 0; i < keys.size(); ++i) {
                if (!is_digit(keys[i]) && !is_upper(keys[i])) {
                    malformed(text, pos + 2 + i, "key qualifiers take digits and uppercase letters only");
                }
                segments.push_back(current + "(+" + std::string(keys.substr(0, i + 1)) + ")");
            }
        } else {
            segments.push_back(current + "(" + std::string(body) + ")");
        }
        current.append(text.substr(pos, close - pos + 1));
        pos = close + 1;
    }
    return IconclassCode(std::move(segments));
}

IconclassCode IconclassCode::prefix(std::size_t level) const {
    if (level == 0 || level > segments_.size()) {
        throw Error(ErrorCode::InvalidArgument,
                    "level " + std::to_string(level) + " out of range for " + raw());
    }
    return IconclassCode({segments_.begin(), segments_.begin() + static_cast<std::ptrdiff_t>(level)});
}

std::vector<IconclassCode> parent_chain(const IconclassCode& code) {
    std::vector<IconclassCode> chain;
    chain.reserve(code.levels());
    for (std::size_t level = 1; level <= code.levels(); ++level) {
        chain.push_back(code.prefix(level));
    }
    return chain;
}

std::size_t common_depth(const IconclassCode& a, const IconclassCode& b) noexcept {
    const auto& sa = a.segments();
    const auto& sb = b.segments();
    const auto [ia, ib] = std::mismatch(sa.begin(), sa.end(), sb.begin(), sb.end());
    return static_cast<std::size_t>(ia - sa.begin());
}

IconclassCode truncate_code(const IconclassCode& code, std::size_t k) {
    const std::size_t drop = std::min(k, code.levels() - 1);
    return code.prefix(code.levels() - drop);
}

}  // namespace iconrag
