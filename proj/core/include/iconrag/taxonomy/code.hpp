#pragma once

#include <compare>
#include <cstddef>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace iconrag {

/// A parsed Iconclass notation such as "73D231" or "11H(PAUL)4".
///
/// Each hierarchy level is stored as the cumulative notation up to and
/// including that level, so segments() for "73D231" is
/// {"7", "73", "73D", "73D2", "73D23", "73D231"}. Digits and uppercase
/// letters add one level each. A bracketed name qualifier like "(PAUL)" adds
/// a single level. A key qualifier "(+XYZ)" adds one level per key character,
/// rendered "(+X)", "(+XY)", "(+XYZ)".
class IconclassCode {
public:
    /// Parses notation text, trimming surrounding whitespace.
    /// Throws Error{MalformedCode} on syntax errors.
    static IconclassCode parse(std::string_view text);

    [[nodiscard]] const std::string& raw() const noexcept { return segments_.back(); }
    [[nodiscard]] const std::vector<std::string>& segments() const noexcept { return segments_; }
    [[nodiscard]] std::size_t levels() const noexcept { return segments_.size(); }

    /// The ancestor (or self) at 1-based depth `level`.
    [[nodiscard]] IconclassCode prefix(std::size_t level) const;

    friend bool operator==(const IconclassCode& a, const IconclassCode& b) noexcept {
        return a.raw() == b.raw();
    }
    friend std::strong_ordering operator<=>(const IconclassCode& a, const IconclassCode& b) noexcept {
        return a.raw().compare(b.raw()) <=> 0;
    }

private:
    explicit IconclassCode(std::vector<std::string> segments) : segments_(std::move(segments)) {}

    std::vector<std::string> segments_;
};

inline IconclassCode parse_code(std::string_view text) { return IconclassCode::parse(text); }

/// Root-first list of every level of `code`, ending with `code` itself.
std::vector<IconclassCode> parent_chain(const IconclassCode& code);

/// Number of leading hierarchy levels shared by both codes.
std::size_t common_depth(const IconclassCode& a, const IconclassCode& b) noexcept;

/// Drops the last `k` levels, never going below the root level.
IconclassCode truncate_code(const IconclassCode& code, std::size_t k);

}  // namespace iconrag

template <>
struct std::hash<iconrag::IconclassCode> {
    std::size_t operator()(const iconrag::IconclassCode& code) const noexcept {
        return std::hash<std::string>{}(code.raw());
    }
};
