#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "iconrag/retrieval/ranked_hit.hpp"
#include "iconrag/taxonomy/code.hpp"
#include "iconrag/taxonomy/documents.hpp"

namespace iconrag {

struct Bm25Params {
    double k1 = 1.2;
    double b = 0.75;
};

struct Posting {
    std::uint32_t doc = 0;  ///< dense document index
    std::uint32_t tf = 0;
    friend bool operator==(const Posting&, const Posting&) = default;
};

/// Okapi BM25 over a single text field.
///
/// Documents are addressed by a dense index in insertion order; ties in
/// search results fall back to ascending notation. Query terms are
/// deduplicated before scoring, so repeating a word in a query does not
/// change its weight.
class KeywordIndex {
public:
    using PostingMap = std::map<std::string, std::vector<Posting>, std::less<>>;

    /// Throws EmptyCorpus or DuplicateDocId.
    static KeywordIndex build(std::span<const Document> docs, Bm25Params params = {});

    /// Reassembles an index from persisted parts, checking every invariant.
    static KeywordIndex from_parts(Bm25Params params, std::vector<IconclassCode> ids,
                                   std::vector<std::uint32_t> lengths, PostingMap postings);

    /// BM25 of one document for the given terms. Throws UnknownDoc.
    [[nodiscard]] double score(std::span<const std::string> query_terms, std::string_view doc_id) const;

    /// Top-k documents with a positive score; ties by ascending notation.
    [[nodiscard]] RankedList search(std::string_view query, std::size_t k) const;

    /// Dense vector of scores for every document.
    [[nodiscard]] std::vector<double> score_all(std::span<const std::string> query_terms) const;

    /// ln(1 + (N - df + 0.5) / (df + 0.5))
    [[nodiscard]] double idf(std::size_t df) const noexcept;
    [[nodiscard]] double term_weight(std::uint32_t tf, std::uint32_t doc_length) const noexcept;

    [[nodiscard]] std::size_t doc_count() const noexcept { return ids_.size(); }
    [[nodiscard]] double avg_doc_length() const noexcept { return avg_doc_length_; }
    [[nodiscard]] const Bm25Params& params() const noexcept { return params_; }
    [[nodiscard]] const std::vector<IconclassCode>& doc_ids() const noexcept { return ids_; }
    [[nodiscard]] const std::vector<std::uint32_t>& doc_lengths() const noexcept { return lengths_; }
    [[nodiscard]] const PostingMap& postings() const noexcept { return postings_; }
    [[nodiscard]] std::optional<std::size_t> index_of(std::string_view doc_id) const noexcept;

private:
    KeywordIndex() = default;
    void finish();

    Bm25Params params_;
    std::vector<IconclassCode> ids_;
    std::vector<std::uint32_t> lengths_;
    PostingMap postings_;
    std::unordered_map<std::string, std::size_t> lookup_;
    double avg_doc_length_ = 0.0;
};

/// Sorts (score desc, notation asc), keeps the first k and assigns ranks.
RankedList rank_by_score(std::vector<std::pair<double, const IconclassCode*>> scored, std::size_t k);

}  // namespace iconrag
