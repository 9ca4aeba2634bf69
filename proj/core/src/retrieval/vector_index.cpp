#include "iconrag/retrieval/vector_index.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "iconrag/error.hpp"

namespace iconrag {
namespace {

double dot(const double* a, const double* b, std::size_t n) noexcept {
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) sum += a[i] * b[i];
    return sum;
}

double distance_from_parts(double dot_product, double norm_u, double norm_v) noexcept {
    const double d = 1.0 - dot_product / (norm_u * norm_v);
    return std::clamp(d, 0.0, 2.0);
}

}  // namespace

double l2_norm(std::span<const double> v) noexcept { return std::sqrt(dot(v.data(), v.data(), v.size())); }

double cosine_distance(std::span<const double> u, std::span<const double> v) {
    if (u.size() != v.size()) {
        throw Error(ErrorCode::DimMismatch, "cosine distance between vectors of dimension " +
                                                std::to_string(u.size()) + " and " + std::to_string(v.size()));
    }
    const double nu = l2_norm(u);
    const double nv = l2_norm(v);
    if (nu == 0.0 || nv == 0.0) throw Error(ErrorCode::ZeroVector, "cosine distance is undefined for a zero vector");
    return distance_from_parts(dot(u.data(), v.data(), u.size()), nu, nv);
}

VectorIndex::VectorIndex(std::size_t dim) : dim_(dim) {
    if (dim == 0) throw Error(ErrorCode::InvalidArgument, "vector index dimension must be positive");
}

void VectorIndex::add(const IconclassCode& id, std::span<const double> vector) {
    if (vector.size() != dim_) {
        throw Error(ErrorCode::DimMismatch, "row " + id.raw() + " has dimension " + std::to_string(vector.size()) +
                                                ", index expects " + std::to_string(dim_));
    }
    const double norm = l2_norm(vector);
    if (norm == 0.0) throw Error(ErrorCode::ZeroVector, "row " + id.raw() + " is an all-zero vector");
    if (!lookup_.emplace(id.raw(), ids_.size()).second) {
        throw Error(ErrorCode::DuplicateDocId, "duplicate document id " + id.raw());
    }
    ids_.push_back(id);
    data_.insert(data_.end(), vector.begin(), vector.end());
    norms_.push_back(norm);
}

std::optional<std::size_t> VectorIndex::index_of(std::string_view id) const noexcept {
    const auto it = lookup_.find(std::string(id));
    if (it == lookup_.end()) return std::nullopt;
    return it->second;
}

void VectorIndex::check_query(std::span<const double> query) const {
    if (query.size() != dim_) {
        throw Error(ErrorCode::DimMismatch, "query has dimension " + std::to_string(query.size()) +
                                                ", index expects " + std::to_string(dim_));
    }
}

std::vector<double> VectorIndex::distances(std::span<const double> query) const {
    check_query(query);
    const double qnorm = l2_norm(query);
    if (qnorm == 0.0) throw Error(ErrorCode::ZeroVector, "query is an all-zero vector");
    std::vector<double> out(ids_.size());
    for (std::size_t i = 0; i < ids_.size(); ++i) {
        out[i] = distance_from_parts(dot(query.data(), data_.data() + i * dim_, dim_), qnorm, norms_[i]);
    }
    return out;
}

RankedList VectorIndex::search(std::span<const double> query, std::size_t k) const {
    const auto dist = distances(query);
    std::vector<std::size_t> order(dist.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    const auto closer = [&](std::size_t a, std::size_t b) {
        if (dist[a] != dist[b]) return dist[a] < dist[b];
        return ids_[a].raw() < ids_[b].raw();
    };
    const std::size_t keep = std::min(k, order.size());
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(keep), order.end(), closer);

    RankedList hits;
    hits.reserve(keep);
    for (std::size_t r = 0; r < keep; ++r) {
        const std::size_t i = order[r];
        hits.push_back({ids_[i], 1.0 - dist[i], r + 1});
    }
    return hits;
}

}  // namespace iconrag
