#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "iconrag/retrieval/ranked_hit.hpp"
#include "iconrag/taxonomy/code.hpp"

namespace iconrag {

/// 1 - (u.v)/(|u||v|), clamped to [0, 2]. Throws DimMismatch or ZeroVector.
double cosine_distance(std::span<const double> u, std::span<const double> v);

/// Euclidean norm accumulated left to right in double precision.
double l2_norm(std::span<const double> v) noexcept;

/// Exhaustive cosine index. Rows are stored as given, with their norms
/// cached so a query costs one dot product per row.
class VectorIndex {
public:
    explicit VectorIndex(std::size_t dim);

    /// Throws DimMismatch, DuplicateDocId or ZeroVector.
    void add(const IconclassCode& id, std::span<const double> vector);

    /// Top-k rows by ascending cosine distance; hit score is 1 - distance.
    /// Ties fall back to ascending notation.
    [[nodiscard]] RankedList search(std::span<const double> query, std::size_t k) const;

    /// Cosine distance from `query` to every row, in insertion order.
    [[nodiscard]] std::vector<double> distances(std::span<const double> query) const;

    [[nodiscard]] std::size_t dim() const noexcept { return dim_; }
    [[nodiscard]] std::size_t size() const noexcept { return ids_.size(); }
    [[nodiscard]] const std::vector<IconclassCode>& ids() const noexcept { return ids_; }
    [[nodiscard]] std::span<const double> row(std::size_t i) const noexcept {
        return {data_.data() + i * dim_, dim_};
    }
    [[nodiscard]] std::optional<std::size_t> index_of(std::string_view id) const noexcept;

private:
    void check_query(std::span<const double> query) const;

    std::size_t dim_;
    std::vector<IconclassCode> ids_;
    std::vector<double> data_;
    std::vector<double> norms_;
    std::unordered_map<std::string, std::size_t> lookup_;
};

}  // namespace iconrag
