#include "iconrag/pipeline/classifier.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <thread>

#include "iconrag/providers/select.hpp"
#include "iconrag/retrieval/hybrid.hpp"
#include "iconrag/util/clock.hpp"
#include "iconrag/util/text.hpp"

namespace iconrag {
namespace {

const SearchIndex& require_index(const ClassifierContext& context, DatabaseKind kind) {
    const SearchIndex* index = context.index(kind);
    if (index == nullptr) {
        throw Error(ErrorCode::MissingIndex, "no " + std::string(to_string(kind)) + " index loaded");
    }
    return *index;
}

const VectorIndex& require_vectors(const SearchIndex& index) {
    if (!index.vectors) throw Error(ErrorCode::MissingIndex, "index was built without vectors");
    return *index.vectors;
}

Embedding embed_query(const std::string& description, const SearchIndex& index, const ClassifierContext& context) {
    if (context.embedder == nullptr) throw Error(ErrorCode::MissingIndex, "no embedding provider configured");
    const auto built_with = index.meta.embedder.is_object() ? index.meta.embedder.value("id", std::string{}) : "";
    if (!built_with.empty() && built_with != context.embedder->id()) {
        throw Error(ErrorCode::DimMismatch,
                    "index was embedded with " + built_with + " but the query embedder is " + context.embedder->id());
    }
    Embedding v = embed_text(description, *context.embedder);
    if (v.size() != require_vectors(index).dim()) {
        throw Error(ErrorCode::DimMismatch, "query embedding has dimension " + std::to_string(v.size()) +
                                                ", index expects " + std::to_string(index.vectors->dim()));
    }
    return v;
}

RankedList base_search(const ClassifyInput& input, const MethodSpec& method, const ClassifierContext& context,
                       std::size_t k) {
    const SearchIndex& index = require_index(context, method.database_kind);
    switch (method.query_kind) {
        case QueryKind::Keyword:
            return index.keyword.search(input.description, k);
        case QueryKind::Vector:
        case QueryKind::RagVector:
            return require_vectors(index).search(embed_query(input.description, index, context), k);
        case QueryKind::Hybrid:
        case QueryKind::RagHybrid: {
            const auto v = embed_query(input.description, index, context);
            return hybrid_search(index.keyword, require_vectors(index), input.description, v,
                                 {method.alpha, method.candidate_pool}, k);
        }
        case QueryKind::ImageVote:
            break;
    }
    throw Error(ErrorCode::InvalidArgument, "image vote has no text search");
}

}  // namespace

SearchIndex build_search_index(const TaxonomyDocuments& docs, DatabaseKind kind, Bm25Params params,
                               EmbeddingProvider* embedder, nlohmann::json config) {
    const auto documents = docs.documents(kind);
    IndexMeta meta;
    meta.database = std::string(to_string(kind));
    meta.embedder = embedder != nullptr ? embedder->describe() : nlohmann::json();
    meta.created_at = utc_timestamp();
    meta.config = std::move(config);

    SearchIndex index{std::move(meta), KeywordIndex::build(documents, params), std::nullopt};
    if (embedder != nullptr) {
        std::vector<std::string> texts;
        texts.reserve(documents.size());
        for (const auto& doc : documents) texts.push_back(doc.text);
        const auto vectors = embedder->embed(texts);
        if (vectors.empty()) throw Error(ErrorCode::EmptyCorpus, "no vectors produced");
        VectorIndex vec(vectors.front().size());
        for (std::size_t i = 0; i < documents.size(); ++i) vec.add(documents[i].id, vectors[i]);
        index.vectors = std::move(vec);
        index.meta.embedder = embedder->describe();
    }
    return index;
}

ImageReferenceSet load_image_references(const std::filesystem::path& path, const TaxonomyDocuments* taxonomy) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::Io, "cannot open image reference file " + path.string());
    std::vector<ReferenceImage> rows;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        ReferenceImage row;
        try {
            const auto rec = nlohmann::json::parse(line);
            row.vector = rec.at("vector").get<Embedding>();
            const auto& codes = rec.contains("codes") ? rec.at("codes") : rec.at("labels");
            for (const auto& code : codes) {
                auto parsed = IconclassCode::parse(code.get<std::string>());
                if (taxonomy != nullptr && taxonomy->find(parsed.raw()) == nullptr) continue;
                row.labels.push_back(std::move(parsed));
            }
        } catch (const nlohmann::json::exception& e) {
            throw Error(ErrorCode::Format, path.string() + " line " + std::to_string(line_no) + ": " + e.what());
        }
        if (!row.labels.empty()) rows.push_back(std::move(row));
    }
    return ImageReferenceSet(std::move(rows));
}

Prediction classify(const ClassifyInput& input, const MethodSpec& method, const ClassifierContext& context) {
    validate(method);
    std::optional<IconclassCode> predicted;
    RankedList candidates_out;
    bool fallback = false;
    std::string response;

    if (method.query_kind == QueryKind::ImageVote) {
        if (context.image_refs == nullptr) throw Error(ErrorCode::MissingIndex, "no image reference set loaded");
        if (!input.image_vector) {
            throw Error(ErrorCode::MissingDescription, input.image_id + ": no image vector supplied");
        }
        auto vote = image_vote_classify(*input.image_vector, *context.image_refs, method.image_k);
        predicted = vote.winner;
        for (std::size_t i = 0; i < vote.table.size(); ++i) {
            candidates_out.push_back({vote.table[i].code, static_cast<double>(vote.table[i].votes), i + 1});
        }
    } else {
        if (trim(input.description).empty()) {
            throw Error(ErrorCode::MissingDescription, input.image_id + ": no description");
        }
        candidates_out = base_search(input, method, context, method.rag_k);
        if (candidates_out.empty()) {
            throw Error(ErrorCode::EmptyResponse, input.image_id + ": search returned no candidates");
        }

        if (is_rag(method.query_kind)) {
            if (context.taxonomy == nullptr) throw Error(ErrorCode::MissingIndex, "no taxonomy documents loaded");
            std::vector<SelectionCandidate> candidates;
            for (const auto& hit : candidates_out) {
                const auto* entry = context.taxonomy->find(hit.code.raw());
                if (entry == nullptr) {
                    throw Error(ErrorCode::UnknownDoc, "candidate " + hit.code.raw() + " is not in the taxonomy");
                }
                candidates.push_back({hit.code, entry->text(method.database_kind)});
            }
            const auto& prompts = context.prompts != nullptr ? *context.prompts : default_prompts();
            const auto selection = context.chat != nullptr
                                       ? select_with_llm(input.description, candidates, *context.chat, prompts)
                                       : offline_select(input.description, candidates);
            predicted = selection.code;
            fallback = selection.fallback;
            response = selection.response;
        } else {
            predicted = candidates_out.front().code;
        }
    }

    if (context.taxonomy != nullptr && context.taxonomy->find(predicted->raw()) == nullptr) {
        throw Error(ErrorCode::UnknownDoc,
                    input.image_id + ": predicted code " + predicted->raw() + " is not in the taxonomy");
    }
    return {input.image_id, method, std::move(*predicted), std::move(candidates_out), fallback, std::move(response)};
}

std::string resolve_description(const ManifestItem& item, DescriptionMode mode, const ClassifierContext& context) {
    if (context.descriptions != nullptr) {
        if (auto hit = context.descriptions->find(item.image_id, mode)) return hit->text;
    }
    if (const auto& supplied = item.supplied_description(mode); !supplied.empty()) return supplied;
    if (context.chat == nullptr || context.descriptions == nullptr) {
        throw Error(ErrorCode::MissingDescription,
                    item.image_id + ": no " + std::string(to_string(mode)) +
                        " description cached or supplied, and no chat provider to generate one");
    }
    const auto& image_path = item.image_path(mode);
    if (image_path.empty()) {
        throw Error(ErrorCode::MissingDescription,
                    item.image_id + ": no " + std::string(to_string(mode)) + " image path in the manifest");
    }
    DescriptionRequest request{item.image_id, read_binary_file(image_path), mode, mime_type_for(image_path.string())};
    const auto& prompts = context.prompts != nullptr ? *context.prompts : default_prompts();
    return describe_image(request, context.chat, *context.descriptions, prompts).text;
}

std::vector<BatchItemResult> classify_batch(std::span<const ManifestItem> manifest, const MethodSpec& method,
                                            const ClassifierContext& context, std::size_t concurrency) {
    validate(method);
    std::vector<BatchItemResult> results(manifest.size());
    std::atomic<std::size_t> next{0};

    const auto work = [&] {
        for (std::size_t i = next++; i < manifest.size(); i = next++) {
            const ManifestItem& item = manifest[i];
            BatchItemResult& result = results[i];
            result.image_id = item.image_id;
            result.ground_truth = item.ground_truth;
            result.group = item.group;
            try {
                ClassifyInput input{item.image_id, {}, std::nullopt};
                if (method.query_kind == QueryKind::ImageVote) {
                    if (item.vector_path.empty()) {
                        throw Error(ErrorCode::MissingDescription, item.image_id + ": manifest has no vector_path");
                    }
                    input.image_vector = load_vector_file(item.vector_path);
                } else {
                    input.description = resolve_description(item, method.description_mode, context);
                }
                result.prediction = classify(input, method, context);
            } catch (const Error& e) {
                result.error = ItemError{e.code(), e.what()};
            } catch (const std::exception& e) {
                result.error = ItemError{ErrorCode::Io, e.what()};
            }
        }
    };

    const std::size_t workers = std::clamp<std::size_t>(concurrency, 1, std::max<std::size_t>(1, manifest.size()));
    if (workers == 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
    }
    return results;
}

}  // namespace iconrag
