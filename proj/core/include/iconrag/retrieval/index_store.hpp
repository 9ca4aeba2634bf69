#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "iconrag/retrieval/keyword_index.hpp"
#include "iconrag/retrieval/vector_index.hpp"

namespace iconrag {

inline constexpr std::string_view kIndexFormat = "iconrag-index/1";

struct IndexMeta {
    std::string database;      ///< "basic" or "hierarchical"
    nlohmann::json embedder;   ///< provider description, null when no vectors
    std::string created_at;    ///< ISO-8601 UTC
    nlohmann::json config;     ///< effective configuration echoed by the caller
};

/// Keyword and (optionally) vector indices over one rendering of the
/// taxonomy, persisted as a directory:
///   meta.json      params, counts, dimension, creation info
///   keyword.json   document ids, lengths and postings
///   vectors.jsonl  one {"id", "vector"} record per document
struct SearchIndex {
    IndexMeta meta;
    KeywordIndex keyword;
    std::optional<VectorIndex> vectors;
};

nlohmann::json meta_json(const SearchIndex& index);

/// Writes the three files, creating `dir` if needed.
void save_index(const std::filesystem::path& dir, const SearchIndex& index);

/// Throws MissingIndex when the directory or keyword.json is absent and
/// Format on inconsistent contents.
SearchIndex load_index(const std::filesystem::path& dir);

}  // namespace iconrag
