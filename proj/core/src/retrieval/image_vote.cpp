#include "iconrag/retrieval/image_vote.hpp"

#include <algorithm>
#include <map>
#include <numeric>

#include "iconrag/error.hpp"
#include "iconrag/retrieval/vector_index.hpp"

namespace iconrag {

ImageReferenceSet::ImageReferenceSet(std::vector<ReferenceImage> rows) : rows_(std::move(rows)) {
    if (rows_.empty()) throw Error(ErrorCode::EmptyReferenceSet, "image reference set is empty");
    const std::size_t dim = rows_.front().vector.size();
    for (std::size_t i = 0; i < rows_.size(); ++i) {
        const auto& row = rows_[i];
        if (row.vector.size() != dim || dim == 0) {
            throw Error(ErrorCode::DimMismatch, "reference row " + std::to_string(i) + " has dimension " +
                                                    std::to_string(row.vector.size()) + ", expected " +
                                                    std::to_string(dim));
        }
        if (l2_norm(row.vector) == 0.0) {
            throw Error(ErrorCode::ZeroVector, "reference row " + std::to_string(i) + " is an all-zero vector");
        }
        if (row.labels.empty()) {
            throw Error(ErrorCode::InvalidArgument, "reference row " + std::to_string(i) + " has no labels");
        }
    }
}

VoteResult image_vote_classify(std::span<const double> query, const ImageReferenceSet& refs, std::size_t k) {
    if (k == 0) throw Error(ErrorCode::InvalidArgument, "image vote needs k >= 1");
    if (query.size() != refs.dim()) {
        throw Error(ErrorCode::DimMismatch, "query has dimension " + std::to_string(query.size()) +
                                                ", references have " + std::to_string(refs.dim()));
    }

    std::vector<Neighbor> all;
    all.reserve(refs.size());
    for (std::size_t i = 0; i < refs.size(); ++i) {
        all.push_back({i, cosine_distance(query, refs.rows()[i].vector)});
    }
    const std::size_t keep = std::min(k, all.size());
    std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(keep), all.end(),
                      [](const Neighbor& a, const Neighbor& b) {
                          if (a.distance != b.distance) return a.distance < b.distance;
                          return a.row < b.row;
                      });
    all.resize(keep);

    struct Tally {
        std::size_t votes = 0;
        std::size_t best_rank = 0;
        std::size_t label_pos = 0;
    };
    std::map<IconclassCode, Tally> tallies;
    for (std::size_t r = 0; r < all.size(); ++r) {
        const auto& labels = refs.rows()[all[r].row].labels;
        for (std::size_t pos = 0; pos < labels.size(); ++pos) {
            auto [it, fresh] = tallies.try_emplace(labels[pos]);
            if (fresh) {
                it->second.best_rank = r + 1;
                it->second.label_pos = pos;
            }
            ++it->second.votes;
        }
    }

    std::vector<std::pair<VoteRow, std::size_t>> rows;
    for (const auto& [code, tally] : tallies) rows.push_back({{code, tally.votes, tally.best_rank}, tally.label_pos});
    std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
        if (a.first.votes != b.first.votes) return a.first.votes > b.first.votes;
        if (a.first.best_rank != b.first.best_rank) return a.first.best_rank < b.first.best_rank;
        if (a.second != b.second) return a.second < b.second;
        return a.first.code < b.first.code;
    });

    std::vector<VoteRow> table;
    table.reserve(rows.size());
    for (auto& row : rows) table.push_back(std::move(row.first));
    IconclassCode winner = table.front().code;
    return {std::move(winner), std::move(table), std::move(all)};
}

}  // namespace iconrag
