#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>

#include "iconrag/taxonomy/code.hpp"

namespace iconrag {

/// Level overlap between a prediction and its ground truth.
struct LevelComparison {
    std::size_t matched = 0;      ///< M
    std::size_t pred_levels = 1;  ///< P
    std::size_t gt_levels = 1;    ///< G

    friend bool operator==(const LevelComparison&, const LevelComparison&) = default;
};

/// Throws InvalidArgument unless 0 <= M <= min(P, G), P >= 1 and G >= 1.
void validate(const LevelComparison& c);

LevelComparison compare(const IconclassCode& pred, const IconclassCode& gt) noexcept;

struct HierarchicalScores {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

HierarchicalScores hierarchical_metrics(const LevelComparison& c);

enum class MatchType { Extra, Full, PartialA, PartialB, PartialC, NoMatch };

inline constexpr MatchType kAllMatchTypes[] = {MatchType::Extra,    MatchType::Full,     MatchType::PartialA,
                                               MatchType::PartialB, MatchType::PartialC, MatchType::NoMatch};

/// "extra", "full", "partial_a", "partial_b", "partial_c", "no_match"
std::string_view to_string(MatchType type) noexcept;
std::string_view display_name(MatchType type) noexcept;
double base_score(MatchType type) noexcept;

MatchType classify_match(const LevelComparison& c);

/// Base score scaled by the matched share of levels, with a deduction of
/// M/P for types containing wrong levels, floored at half the base.
double weighted_score(const LevelComparison& c);

struct EvalRecord {
    std::string image_id;
    LevelComparison comparison;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    MatchType match_type = MatchType::NoMatch;
    double weighted = 0.0;
};

EvalRecord evaluate_pair(std::string image_id, const IconclassCode& pred, const IconclassCode& gt);

}  // namespace iconrag
