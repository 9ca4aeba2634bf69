#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "iconrag/providers/description.hpp"
#include "iconrag/taxonomy/taxonomy.hpp"

namespace iconrag {

enum class QueryKind { ImageVote, Keyword, Vector, Hybrid, RagVector, RagHybrid };

/// "image", "keyword", "vector", "hybrid", "rag-vector", "rag-hybrid"
std::string_view to_string(QueryKind kind) noexcept;
std::optional<QueryKind> parse_query_kind(std::string_view text) noexcept;

[[nodiscard]] constexpr bool is_rag(QueryKind kind) noexcept {
    return kind == QueryKind::RagVector || kind == QueryKind::RagHybrid;
}
[[nodiscard]] constexpr bool needs_vectors(QueryKind kind) noexcept {
    return kind == QueryKind::Vector || kind == QueryKind::Hybrid || is_rag(kind);
}

/// One classification method: a row of the method matrix.
struct MethodSpec {
    QueryKind query_kind = QueryKind::Hybrid;
    DescriptionMode description_mode = DescriptionMode::FullPage;  ///< unused for ImageVote
    DatabaseKind database_kind = DatabaseKind::Hierarchical;        ///< unused for ImageVote
    double alpha = 0.75;               ///< hybrid weight of the vector side
    std::size_t candidate_pool = 100;  ///< hybrid K0
    std::size_t rag_k = 5;             ///< candidates handed to the selector
    std::size_t image_k = 10;          ///< neighbors for the image vote

    /// "<query>-<image>-<database>", e.g. "rag-vector-page-basic"; the image
    /// vote reads "image-illustration-image".
    [[nodiscard]] std::string label() const;
};

/// A method with the default database for its query kind: RAG over vector
/// search uses the basic database, RAG over hybrid search the hierarchical.
MethodSpec default_method(QueryKind kind, DescriptionMode mode = DescriptionMode::FullPage);

/// Throws InvalidArgument on out-of-range parameters.
void validate(const MethodSpec& method);

/// The fifteen standard method configurations, in report order.
std::vector<MethodSpec> reference_methods();

nlohmann::json to_json(const MethodSpec& method);
MethodSpec method_from_json(const nlohmann::json& j);

/// Inverse of MethodSpec::label for the query/image/database part.
std::optional<MethodSpec> parse_method_label(std::string_view label);

}  // namespace iconrag
