#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "iconrag/error.hpp"
#include "iconrag/pipeline/manifest.hpp"
#include "iconrag/pipeline/method.hpp"
#include "iconrag/providers/chat.hpp"
#include "iconrag/providers/description.hpp"
#include "iconrag/providers/embedding.hpp"
#include "iconrag/providers/prompts.hpp"
#include "iconrag/retrieval/image_vote.hpp"
#include "iconrag/retrieval/index_store.hpp"
#include "iconrag/taxonomy/documents.hpp"

namespace iconrag {

/// Builds the keyword index, and the vector index when `embedder` is
/// given, over one rendering of the taxonomy.
SearchIndex build_search_index(const TaxonomyDocuments& docs, DatabaseKind kind, Bm25Params params,
                               EmbeddingProvider* embedder, nlohmann::json config = nlohmann::json::object());

/// Reads reference images from JSON lines carrying "vector" and "codes".
/// With `taxonomy`, labels outside it are dropped, then rows left without
/// labels.
ImageReferenceSet load_image_references(const std::filesystem::path& path,
                                        const TaxonomyDocuments* taxonomy = nullptr);

/// Everything classify() may need. Unused members may stay null; a method
/// that needs a missing one fails with MissingIndex.
struct ClassifierContext {
    const TaxonomyDocuments* taxonomy = nullptr;
    const SearchIndex* basic = nullptr;
    const SearchIndex* hierarchical = nullptr;
    const ImageReferenceSet* image_refs = nullptr;
    EmbeddingProvider* embedder = nullptr;
    ChatProvider* chat = nullptr;  ///< null: RAG uses offline_select
    DescriptionCache* descriptions = nullptr;
    const PromptTemplates* prompts = nullptr;

    [[nodiscard]] const SearchIndex* index(DatabaseKind kind) const noexcept {
        return kind == DatabaseKind::Basic ? basic : hierarchical;
    }
};

struct ClassifyInput {
    std::string image_id;
    std::string description;             ///< required for text methods
    std::optional<Embedding> image_vector;  ///< required for the image vote
};

struct Prediction {
    std::string image_id;
    MethodSpec method;
    IconclassCode predicted;
    RankedList candidates;
    bool fallback = false;
    std::string selection_response;
};

/// Runs one method on one input. Keyword, vector and hybrid take the top
/// hit; RAG methods hand the top rag_k hits of their base search to the
/// selector; the image vote takes the plurality code.
Prediction classify(const ClassifyInput& input, const MethodSpec& method, const ClassifierContext& context);

struct ItemError {
    ErrorCode code;
    std::string message;
};

struct BatchItemResult {
    std::string image_id;
    std::string ground_truth;
    std::string group;
    std::optional<Prediction> prediction;
    std::optional<ItemError> error;
};

/// Description for a text method: cache, then manifest-supplied text, then
/// the chat provider. Throws MissingDescription when none is available.
std::string resolve_description(const ManifestItem& item, DescriptionMode mode, const ClassifierContext& context);

/// Classifies every manifest item with up to `concurrency` workers. Results
/// follow manifest order; a failing item yields an error record instead of
/// aborting the batch.
std::vector<BatchItemResult> classify_batch(std::span<const ManifestItem> manifest, const MethodSpec& method,
                                            const ClassifierContext& context, std::size_t concurrency = 1);

}  // namespace iconrag
