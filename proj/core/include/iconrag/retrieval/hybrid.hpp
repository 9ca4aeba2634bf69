#pragma once

#include <cstddef>
#include <span>
#include <string_view>

#include "iconrag/retrieval/keyword_index.hpp"
#include "iconrag/retrieval/ranked_hit.hpp"
#include "iconrag/retrieval/vector_index.hpp"

namespace iconrag {

struct HybridParams {
    double alpha = 0.75;              ///< weight of the vector side
    std::size_t candidate_pool = 100; ///< top-K0 taken from each method
};

/// One pooled candidate with the raw and min-max normalized scores of
/// both methods.
struct HybridCandidate {
    std::size_t doc = 0;  ///< dense index shared by both indices
    double keyword_raw = 0.0;
    double vector_raw = 0.0;
    double keyword_norm = 0.0;
    double vector_norm = 0.0;
    double fused = 0.0;
};

/// Relative-score fusion. The pool is the union of the top candidate_pool
/// hits of each method; every pooled document gets its actual score from
/// both methods (BM25 is 0 when no term matches), each method's scores are
/// min-max normalized over the pool, and fused = alpha * vector +
/// (1 - alpha) * keyword. Both indices must cover the same documents.
std::vector<HybridCandidate> hybrid_candidates(const KeywordIndex& keyword, const VectorIndex& vectors,
                                               std::string_view query_text, std::span<const double> query_vector,
                                               const HybridParams& params);

/// Top-k of the fused pool, ties by ascending notation. Throws
/// InvalidArgument when alpha is outside [0, 1].
RankedList hybrid_search(const KeywordIndex& keyword, const VectorIndex& vectors, std::string_view query_text,
                         std::span<const double> query_vector, const HybridParams& params, std::size_t k);

}  // namespace iconrag
