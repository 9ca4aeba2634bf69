#include "iconrag/evaluation/metrics.hpp"

#include <algorithm>

#include "iconrag/error.hpp"

namespace iconrag {

void validate(const LevelComparison& c) {
    if (c.pred_levels < 1 || c.gt_levels < 1 || c.matched > std::min(c.pred_levels, c.gt_levels)) {
        throw Error(ErrorCode::InvalidArgument, "invalid level comparison (M=" + std::to_string(c.matched) +
                                                    ", P=" + std::to_string(c.pred_levels) +
                                                    ", G=" + std::to_string(c.gt_levels) + ")");
    }
}

LevelComparison compare(const IconclassCode& pred, const IconclassCode& gt) noexcept {
    return {common_depth(pred, gt), pred.levels(), gt.levels()};
}

HierarchicalScores hierarchical_metrics(const LevelComparison& c) {
    validate(c);
    HierarchicalScores s;
    s.precision = static_cast<double>(c.matched) / static_cast<double>(c.pred_levels);
    s.recall = static_cast<double>(c.matched) / static_cast<double>(c.gt_levels);
    // 2PR/(P+R) reduces to 2M/(P+G); dividing the counts avoids compounding rounding.
    if (c.matched > 0) s.f1 = 2.0 * static_cast<double>(c.matched) / static_cast<double>(c.pred_levels + c.gt_levels);
    return s;
}

std::string_view to_string(MatchType type) noexcept {
    switch (type) {
        case MatchType::Extra: return "extra";
        case MatchType::Full: return "full";
        case MatchType::PartialA: return "partial_a";
        case MatchType::PartialB: return "partial_b";
        case MatchType::PartialC: return "partial_c";
        case MatchType::NoMatch: return "no_match";
    }
    return "?";
}

std::string_view display_name(MatchType type) noexcept {
    switch (type) {
        case MatchType::Extra: return "Extra Match";
        case MatchType::Full: return "Full Match";
        case MatchType::PartialA: return "Partial A (short, all correct)";
        case MatchType::PartialB: return "Partial B (short, some correct)";
        case MatchType::PartialC: return "Partial C (deep, some correct)";
        case MatchType::NoMatch: return "No Match";
    }
    return "?";
}

double base_score(MatchType type) noexcept {
    switch (type) {
        case MatchType::Full: return 100.0;
        case MatchType::Extra: return 90.0;
        case MatchType::PartialA: return 85.0;
        case MatchType::PartialB: return 70.0;
        case MatchType::PartialC: return 60.0;
        case MatchType::NoMatch: return 0.0;
    }
    return 0.0;
}

MatchType classify_match(const LevelComparison& c) {
    validate(c);
    const auto [m, p, g] = c;
    if (m == p && p == g) return MatchType::Full;
    if (m == 0) return MatchType::NoMatch;
    if (m == g && p > g) return MatchType::Extra;
    if (p < g) return m == p ? MatchType::PartialA : MatchType::PartialB;
    return MatchType::PartialC;
}

double weighted_score(const LevelComparison& c) {
    const MatchType type = classify_match(c);
    const double base = base_score(type);
    const auto m = static_cast<double>(c.matched);
    const auto p = static_cast<double>(c.pred_levels);
    const auto g = static_cast<double>(c.gt_levels);
    switch (type) {
        case MatchType::Full:
        case MatchType::Extra:
        case MatchType::NoMatch:
            return base;
        case MatchType::PartialA:
            return std::max(base * m / g, base / 2.0);
        case MatchType::PartialB:
            return std::max(base * m * m / (g * p), base / 2.0);
        case MatchType::PartialC:
            return std::max(base * std::min(m, g) * m / (g * p), base / 2.0);
    }
    return 0.0;
}

EvalRecord evaluate_pair(std::string image_id, const IconclassCode& pred, const IconclassCode& gt) {
    EvalRecord r;
    r.image_id = std::move(image_id);
    r.comparison = compare(pred, gt);
    const auto scores = hierarchical_metrics(r.comparison);
    r.precision = scores.precision;
    r.recall = scores.recall;
    r.f1 = scores.f1;
    r.match_type = classify_match(r.comparison);
    r.weighted = weighted_score(r.comparison);
    return r;
}

}  // namespace iconrag
