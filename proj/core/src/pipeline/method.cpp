#include "iconrag/pipeline/method.hpp"

#include <array>

#include "iconrag/error.hpp"

namespace iconrag {
namespace {

constexpr std::array<std::pair<QueryKind, std::string_view>, 6> kQueryNames{{
    {QueryKind::ImageVote, "image"},
    {QueryKind::Keyword, "keyword"},
    {QueryKind::Vector, "vector"},
    {QueryKind::Hybrid, "hybrid"},
    {QueryKind::RagVector, "rag-vector"},
    {QueryKind::RagHybrid, "rag-hybrid"},
}};

}  // namespace

std::string_view to_string(QueryKind kind) noexcept {
    for (const auto& [k, name] : kQueryNames) {
        if (k == kind) return name;
    }
    return "unknown";
}

std::optional<QueryKind> parse_query_kind(std::string_view text) noexcept {
    for (const auto& [k, name] : kQueryNames) {
        if (name == text) return k;
    }
    return std::nullopt;
}

std::string MethodSpec::label() const {
    if (query_kind == QueryKind::ImageVote) return "image-illustration-image";
    return std::string(to_string(query_kind)) + "-" + std::string(to_string(description_mode)) + "-" +
           std::string(to_string(database_kind));
}

MethodSpec default_method(QueryKind kind, DescriptionMode mode) {
    MethodSpec spec;
    spec.query_kind = kind;
    spec.description_mode = mode;
    spec.database_kind = kind == QueryKind::RagVector ? DatabaseKind::Basic : DatabaseKind::Hierarchical;
    return spec;
}

void validate(const MethodSpec& method) {
    if (!(method.alpha >= 0.0 && method.alpha <= 1.0)) {
        throw Error(ErrorCode::InvalidArgument, "alpha must lie in [0, 1]");
    }
    if (method.rag_k == 0) throw Error(ErrorCode::InvalidArgument, "rag_k must be at least 1");
    if (method.candidate_pool == 0) throw Error(ErrorCode::InvalidArgument, "candidate pool must be at least 1");
    if (method.image_k == 0) throw Error(ErrorCode::InvalidArgument, "image_k must be at least 1");
}

std::vector<MethodSpec> reference_methods() {
    std::vector<MethodSpec> rows;
    rows.push_back(default_method(QueryKind::ImageVote, DescriptionMode::Illustration));
    for (const auto kind : {QueryKind::Keyword, QueryKind::Vector, QueryKind::Hybrid}) {
        for (const auto mode : {DescriptionMode::Illustration, DescriptionMode::FullPage}) {
            for (const auto db : {DatabaseKind::Basic, DatabaseKind::Hierarchical}) {
                MethodSpec spec = default_method(kind, mode);
                spec.database_kind = db;
                rows.push_back(spec);
            }
        }
    }
    rows.push_back(default_method(QueryKind::RagVector));
    rows.push_back(default_method(QueryKind::RagHybrid));
    return rows;
}

nlohmann::json to_json(const MethodSpec& method) {
    nlohmann::json j{{"label", method.label()}, {"query", to_string(method.query_kind)}};
    if (method.query_kind == QueryKind::ImageVote) {
        j["image_k"] = method.image_k;
        return j;
    }
    j["mode"] = to_string(method.description_mode);
    j["database"] = to_string(method.database_kind);
    if (method.query_kind == QueryKind::Hybrid || method.query_kind == QueryKind::RagHybrid) {
        j["alpha"] = method.alpha;
        j["candidate_pool"] = method.candidate_pool;
    }
    if (is_rag(method.query_kind)) j["rag_k"] = method.rag_k;
    return j;
}

MethodSpec method_from_json(const nlohmann::json& j) {
    const auto kind = parse_query_kind(j.at("query").get<std::string>());
    if (!kind) throw Error(ErrorCode::Format, "unknown query kind in method record");
    MethodSpec spec = default_method(*kind);
    if (j.contains("mode")) {
        const auto mode = parse_description_mode(j.at("mode").get<std::string>());
        if (!mode) throw Error(ErrorCode::Format, "unknown description mode in method record");
        spec.description_mode = *mode;
    }
    if (j.contains("database")) {
        const auto db = parse_database_kind(j.at("database").get<std::string>());
        if (!db) throw Error(ErrorCode::Format, "unknown database in method record");
        spec.database_kind = *db;
    }
    spec.alpha = j.value("alpha", spec.alpha);
    spec.candidate_pool = j.value("candidate_pool", spec.candidate_pool);
    spec.rag_k = j.value("rag_k", spec.rag_k);
    spec.image_k = j.value("image_k", spec.image_k);
    return spec;
}

std::optional<MethodSpec> parse_method_label(std::string_view label) {
    if (label == "image-illustration-image") return default_method(QueryKind::ImageVote, DescriptionMode::Illustration);
    const auto last = label.rfind('-');
    if (last == std::string_view::npos) return std::nullopt;
    const auto mid = label.rfind('-', last - 1);
    if (mid == std::string_view::npos || last == 0) return std::nullopt;
    const auto kind = parse_query_kind(label.substr(0, mid));
    const auto mode = parse_description_mode(label.substr(mid + 1, last - mid - 1));
    const auto db = parse_database_kind(label.substr(last + 1));
    if (!kind || !mode || !db) return std::nullopt;
    MethodSpec spec = default_method(*kind, *mode);
    spec.database_kind = *db;
    return spec;
}

}  // namespace iconrag
