#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "iconrag/taxonomy/code.hpp"

namespace iconrag {

struct TaxonomyEntry {
    IconclassCode code;
    std::string text;
};

/// Top-level categories kept by default: 1 (Religion and Magic) and 7 (Bible).
inline const std::vector<std::string> kDefaultPrefixFilter{"1", "7"};

struct LoadStats {
    std::size_t lines = 0;       ///< physical lines read
    std::size_t blank = 0;
    std::size_t filtered = 0;    ///< well-formed entries outside the prefix filter
    std::size_t entries = 0;
    std::vector<std::string> warnings;
};

/// An immutable, filtered set of Iconclass entries keyed by raw notation.
class Taxonomy {
public:
    Taxonomy() = default;
    explicit Taxonomy(std::vector<std::string> prefix_filter) : prefix_filter_(std::move(prefix_filter)) {}

    /// Adds an entry. Throws DuplicateCode if the code is present and
    /// InvalidArgument if the code does not pass the prefix filter or the
    /// text is blank.
    void add(TaxonomyEntry entry);

    [[nodiscard]] bool accepts(const IconclassCode& code) const noexcept;
    [[nodiscard]] const TaxonomyEntry* find(std::string_view raw) const noexcept;
    [[nodiscard]] const TaxonomyEntry& at(std::string_view raw) const;
    [[nodiscard]] bool contains(std::string_view raw) const noexcept { return find(raw) != nullptr; }

    [[nodiscard]] std::size_t size() const noexcept { return entries_.size(); }
    [[nodiscard]] bool empty() const noexcept { return entries_.empty(); }
    [[nodiscard]] const std::vector<std::string>& prefix_filter() const noexcept { return prefix_filter_; }

    /// Entries in ascending raw-notation order.
    [[nodiscard]] const std::map<std::string, TaxonomyEntry, std::less<>>& entries() const noexcept {
        return entries_;
    }

private:
    std::map<std::string, TaxonomyEntry, std::less<>> entries_;
    std::vector<std::string> prefix_filter_{kDefaultPrefixFilter};
};

struct LoadedTaxonomy {
    Taxonomy taxonomy;
    LoadStats stats;
};

/// Reads `code<TAB>description` lines, or JSON lines carrying `code` (or
/// `n`) and `txt` fields; the format is detected from the first non-blank
/// line. Errors: MalformedLine (with line number), DuplicateCode.
LoadedTaxonomy load_taxonomy(std::istream& in, std::vector<std::string> prefix_filter = kDefaultPrefixFilter);
LoadedTaxonomy load_taxonomy_file(const std::filesystem::path& path,
                                  std::vector<std::string> prefix_filter = kDefaultPrefixFilter);

/// The entry's own description. The notation itself is never part of it.
std::string render_basic_doc(const TaxonomyEntry& entry);

/// Ancestor descriptions root-first, joined with "; ", ending with the
/// entry's own description. Throws MissingAncestor naming every ancestor
/// absent from `taxonomy`.
std::string render_hierarchical_doc(const TaxonomyEntry& entry, const Taxonomy& taxonomy);

/// Like render_hierarchical_doc but skips missing ancestors; the missing
/// notations are appended to `missing` when given.
std::string render_hierarchical_doc_lenient(const TaxonomyEntry& entry, const Taxonomy& taxonomy,
                                            std::vector<std::string>* missing = nullptr);

enum class DatabaseKind { Basic, Hierarchical };

std::string_view to_string(DatabaseKind kind) noexcept;
std::optional<DatabaseKind> parse_database_kind(std::string_view text) noexcept;

}  // namespace iconrag
