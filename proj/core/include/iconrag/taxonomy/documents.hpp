#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "iconrag/taxonomy/taxonomy.hpp"

namespace iconrag {

/// One indexable text keyed by the Iconclass code it describes.
struct Document {
    IconclassCode id;
    std::string text;
};

/// Both renderings of one taxonomy entry.
struct RenderedEntry {
    IconclassCode code;
    std::string basic;
    std::string hierarchical;

    [[nodiscard]] const std::string& text(DatabaseKind kind) const noexcept {
        return kind == DatabaseKind::Basic ? basic : hierarchical;
    }
};

/// The basic and hierarchical documents of a whole taxonomy, persisted as
/// `taxonomy.jsonl` with one {"code", "basic", "hierarchical"} object per
/// line in ascending notation order.
class TaxonomyDocuments {
public:
    /// Renders every entry. Strict mode throws MissingAncestor; lenient mode
    /// skips missing ancestors and reports them through `warnings`.
    static TaxonomyDocuments render(const Taxonomy& taxonomy, bool lenient = false,
                                    std::vector<std::string>* warnings = nullptr);
    static TaxonomyDocuments load(const std::filesystem::path& path);
    void save(const std::filesystem::path& path) const;

    [[nodiscard]] const RenderedEntry* find(std::string_view code) const noexcept;
    [[nodiscard]] const std::vector<RenderedEntry>& entries() const noexcept { return entries_; }
    [[nodiscard]] std::size_t size() const noexcept { return entries_.size(); }
    [[nodiscard]] std::vector<Document> documents(DatabaseKind kind) const;

private:
    void add(RenderedEntry entry);

    std::vector<RenderedEntry> entries_;
    std::unordered_map<std::string, std::size_t> lookup_;
};

}  // namespace iconrag
