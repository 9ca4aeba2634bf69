#include "iconrag/retrieval/hybrid.hpp"

#include <algorithm>
#include <set>

#include "iconrag/error.hpp"
#include "iconrag/retrieval/tokenize.hpp"

namespace iconrag {
namespace {

void min_max(std::vector<HybridCandidate>& pool, double HybridCandidate::*raw, double HybridCandidate::*norm) {
    if (pool.empty()) return;
    const auto [lo, hi] = std::minmax_element(pool.begin(), pool.end(),
                                              [&](const auto& a, const auto& b) { return a.*raw < b.*raw; });
    const double min = (*lo).*raw;
    const double range = (*hi).*raw - min;
    for (auto& c : pool) {
        if (range > 0.0) {
            c.*norm = (c.*raw - min) / range;
        } else {
            c.*norm = (c.*raw > 0.0) ? 1.0 : 0.0;
        }
    }
}

}  // namespace

std::vector<HybridCandidate> hybrid_candidates(const KeywordIndex& keyword, const VectorIndex& vectors,
                                               std::string_view query_text, std::span<const double> query_vector,
                                               const HybridParams& params) {
    if (!(params.alpha >= 0.0 && params.alpha <= 1.0)) {
        throw Error(ErrorCode::InvalidArgument, "hybrid alpha must lie in [0, 1]");
    }
    if (keyword.doc_count() != vectors.size()) {
        throw Error(ErrorCode::InvalidArgument, "keyword and vector indices cover different document counts");
    }

    const auto kw_hits = keyword.search(query_text, params.candidate_pool);
    const auto vec_hits = vectors.search(query_vector, params.candidate_pool);

    // Pool members are keyed by their vector-index position.
    std::set<std::size_t> members;
    for (const auto& hit : vec_hits) members.insert(*vectors.index_of(hit.code.raw()));
    for (const auto& hit : kw_hits) {
        const auto row = vectors.index_of(hit.code.raw());
        if (!row) throw Error(ErrorCode::InvalidArgument, "document " + hit.code.raw() + " missing from vector index");
        members.insert(*row);
    }

    const auto terms = tokenize(query_text);
    const auto distances = vectors.distances(query_vector);
    std::vector<HybridCandidate> pool;
    pool.reserve(members.size());
    for (const std::size_t row : members) {
        const auto& id = vectors.ids()[row];
        const auto kw_doc = keyword.index_of(id.raw());
        if (!kw_doc) throw Error(ErrorCode::InvalidArgument, "document " + id.raw() + " missing from keyword index");
        HybridCandidate c;
        c.doc = row;
        c.keyword_raw = keyword.score(terms, id.raw());
        c.vector_raw = 1.0 - distances[row];
        pool.push_back(c);
    }
    min_max(pool, &HybridCandidate::keyword_raw, &HybridCandidate::keyword_norm);
    min_max(pool, &HybridCandidate::vector_raw, &HybridCandidate::vector_norm);
    for (auto& c : pool) {
        c.fused = params.alpha * c.vector_norm + (1.0 - params.alpha) * c.keyword_norm;
    }
    return pool;
}

RankedList hybrid_search(const KeywordIndex& keyword, const VectorIndex& vectors, std::string_view query_text,
                         std::span<const double> query_vector, const HybridParams& params, std::size_t k) {
    const auto pool = hybrid_candidates(keyword, vectors, query_text, query_vector, params);
    std::vector<std::pair<double, const IconclassCode*>> scored;
    scored.reserve(pool.size());
    for (const auto& c : pool) scored.emplace_back(c.fused, &vectors.ids()[c.doc]);
    return rank_by_score(std::move(scored), k);
}

}  // namespace iconrag
