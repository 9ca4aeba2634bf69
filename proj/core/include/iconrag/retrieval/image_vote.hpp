#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "iconrag/taxonomy/code.hpp"

namespace iconrag {

struct ReferenceImage {
    std::vector<double> vector;
    std::vector<IconclassCode> labels;
};

/// Precomputed embeddings of labelled reference images.
class ImageReferenceSet {
public:
    /// Throws EmptyReferenceSet, DimMismatch, ZeroVector, or InvalidArgument
    /// for a row without labels.
    explicit ImageReferenceSet(std::vector<ReferenceImage> rows);

    [[nodiscard]] std::size_t dim() const noexcept { return rows_.front().vector.size(); }
    [[nodiscard]] std::size_t size() const noexcept { return rows_.size(); }
    [[nodiscard]] const std::vector<ReferenceImage>& rows() const noexcept { return rows_; }

private:
    std::vector<ReferenceImage> rows_;
};

struct VoteRow {
    IconclassCode code;
    std::size_t votes = 0;
    std::size_t best_rank = 0;  ///< 1-based rank of the nearest neighbor carrying the code
};

struct Neighbor {
    std::size_t row = 0;
    double distance = 0.0;
};

struct VoteResult {
    IconclassCode winner;
    std::vector<VoteRow> table;       ///< sorted winner-first
    std::vector<Neighbor> neighbors;  ///< nearest-first
};

/// Plurality vote over the labels of the k nearest reference images (cosine
/// distance, ties by row order). Equal vote counts go to the code whose
/// nearest supporting neighbor ranks best; a neighbor carrying several tied
/// codes decides by its label order.
VoteResult image_vote_classify(std::span<const double> query, const ImageReferenceSet& refs, std::size_t k = 10);

}  // namespace iconrag
