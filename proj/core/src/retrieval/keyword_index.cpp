#include "iconrag/retrieval/keyword_index.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "iconrag/error.hpp"
#include "iconrag/retrieval/tokenize.hpp"

namespace iconrag {
namespace {

std::vector<std::string> dedupe(std::span<const std::string> terms) {
    std::vector<std::string> out;
    for (const auto& term : terms) {
        if (std::find(out.begin(), out.end(), term) == out.end()) out.push_back(term);
    }
    return out;
}

}  // namespace

KeywordIndex KeywordIndex::build(std::span<const Document> docs, Bm25Params params) {
    if (docs.empty()) throw Error(ErrorCode::EmptyCorpus, "cannot build a keyword index over zero documents");

    KeywordIndex index;
    index.params_ = params;
    index.ids_.reserve(docs.size());
    index.lengths_.reserve(docs.size());
    for (const auto& doc : docs) {
        const auto dense = static_cast<std::uint32_t>(index.ids_.size());
        if (!index.lookup_.emplace(doc.id.raw(), dense).second) {
            throw Error(ErrorCode::DuplicateDocId, "duplicate document id " + doc.id.raw());
        }
        index.ids_.push_back(doc.id);

        const auto tokens = tokenize(doc.text);
        index.lengths_.push_back(static_cast<std::uint32_t>(tokens.size()));
        std::map<std::string_view, std::uint32_t> counts;
        for (const auto& token : tokens) ++counts[token];
        for (const auto& [term, tf] : counts) {
            auto it = index.postings_.find(term);
            if (it == index.postings_.end()) it = index.postings_.emplace(std::string(term), std::vector<Posting>{}).first;
            it->second.push_back({dense, tf});
        }
    }
    index.finish();
    return index;
}

KeywordIndex KeywordIndex::from_parts(Bm25Params params, std::vector<IconclassCode> ids,
                                      std::vector<std::uint32_t> lengths, PostingMap postings) {
    if (ids.empty()) throw Error(ErrorCode::EmptyCorpus, "keyword index has no documents");
    if (ids.size() != lengths.size()) {
        throw Error(ErrorCode::Format, "keyword index: ids and doc lengths differ in size");
    }
    KeywordIndex index;
    index.params_ = params;
    index.ids_ = std::move(ids);
    index.lengths_ = std::move(lengths);
    index.postings_ = std::move(postings);
    for (std::size_t i = 0; i < index.ids_.size(); ++i) {
        if (!index.lookup_.emplace(index.ids_[i].raw(), i).second) {
            throw Error(ErrorCode::DuplicateDocId, "duplicate document id " + index.ids_[i].raw());
        }
    }
    for (const auto& [term, list] : index.postings_) {
        for (const auto& posting : list) {
            if (posting.doc >= index.ids_.size() || posting.tf == 0 ||
                (&posting != list.data() && (&posting - 1)->doc >= posting.doc)) {
                throw Error(ErrorCode::Format, "keyword index: bad posting for term '" + term + "'");
            }
        }
    }
    index.finish();
    return index;
}

void KeywordIndex::finish() {
    const double total = std::accumulate(lengths_.begin(), lengths_.end(), 0.0);
    avg_doc_length_ = total / static_cast<double>(lengths_.size());
}

double KeywordIndex::idf(std::size_t df) const noexcept {
    const auto n = static_cast<double>(ids_.size());
    const auto d = static_cast<double>(df);
    return std::log(1.0 + (n - d + 0.5) / (d + 0.5));
}

double KeywordIndex::term_weight(std::uint32_t tf, std::uint32_t doc_length) const noexcept {
    const auto f = static_cast<double>(tf);
    const double norm = 1.0 - params_.b + params_.b * static_cast<double>(doc_length) / avg_doc_length_;
    return (f * (params_.k1 + 1.0)) / (f + params_.k1 * norm);
}

std::optional<std::size_t> KeywordIndex::index_of(std::string_view doc_id) const noexcept {
    const auto it = lookup_.find(std::string(doc_id));
    if (it == lookup_.end()) return std::nullopt;
    return it->second;
}

double KeywordIndex::score(std::span<const std::string> query_terms, std::string_view doc_id) const {
    const auto dense = index_of(doc_id);
    if (!dense) throw Error(ErrorCode::UnknownDoc, "unknown document " + std::string(doc_id));

    double total = 0.0;
    for (const auto& term : dedupe(query_terms)) {
        const auto it = postings_.find(term);
        if (it == postings_.end()) continue;
        const auto& list = it->second;
        const auto hit = std::lower_bound(list.begin(), list.end(), *dense,
                                          [](const Posting& p, std::size_t d) { return p.doc < d; });
        if (hit == list.end() || hit->doc != *dense) continue;
        total += idf(list.size()) * term_weight(hit->tf, lengths_[*dense]);
    }
    return total;
}

std::vector<double> KeywordIndex::score_all(std::span<const std::string> query_terms) const {
    std::vector<double> scores(ids_.size(), 0.0);
    for (const auto& term : dedupe(query_terms)) {
        const auto it = postings_.find(term);
        if (it == postings_.end()) continue;
        const double w = idf(it->second.size());
        for (const auto& posting : it->second) {
            scores[posting.doc] += w * term_weight(posting.tf, lengths_[posting.doc]);
        }
    }
    return scores;
}

RankedList KeywordIndex::search(std::string_view query, std::size_t k) const {
    const auto terms = tokenize(query);
    const auto scores = score_all(terms);
    std::vector<std::pair<double, const IconclassCode*>> scored;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        if (scores[i] > 0.0) scored.emplace_back(scores[i], &ids_[i]);
    }
    return rank_by_score(std::move(scored), k);
}

RankedList rank_by_score(std::vector<std::pair<double, const IconclassCode*>> scored, std::size_t k) {
    const auto better = [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second->raw() < b.second->raw();
    };
    const std::size_t keep = std::min(k, scored.size());
    std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(keep), scored.end(), better);
    RankedList hits;
    hits.reserve(keep);
    for (std::size_t i = 0; i < keep; ++i) {
        hits.push_back({*scored[i].second, scored[i].first, i + 1});
    }
    return hits;
}

}  // namespace iconrag
