#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "iconrag/evaluation/metrics.hpp"

namespace iconrag {

struct PredictionPair {
    std::string image_id;
    IconclassCode predicted;
    IconclassCode ground_truth;
};

/// Reads `image_id,predicted_code,ground_truth_code` with a header row.
/// Throws Format on a bad header or an empty file, MalformedCode (with the
/// row number) on any code that does not parse.
std::vector<PredictionPair> read_prediction_csv(std::istream& in, const std::string& source = "<stream>");
std::vector<PredictionPair> read_prediction_csv_file(const std::filesystem::path& path);

std::vector<EvalRecord> evaluate_pairs(std::span<const PredictionPair> pairs);

struct MethodSummary {
    std::size_t count = 0;
    double weighted = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    std::array<std::size_t, 6> match_counts{};  ///< indexed like kAllMatchTypes

    [[nodiscard]] std::size_t count_of(MatchType type) const noexcept;
};

/// Macro averages and match-type counts.
MethodSummary aggregate(std::span<const EvalRecord> records);

struct LevelAccuracyRow {
    std::size_t level = 0;
    std::size_t objects = 0;  ///< records matching at least `level` levels
    double percent = 0.0;
};

std::vector<LevelAccuracyRow> level_accuracy(std::span<const EvalRecord> records, std::size_t max_level = 9);

struct TruncationRow {
    std::size_t k = 0;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    double avg_levels = 0.0;
};

/// Metrics after dropping k trailing levels from every prediction (never
/// below one level), for k = 0..max_k.
std::vector<TruncationRow> truncation_report(std::span<const PredictionPair> pairs, std::size_t max_k = 4);

struct MethodReport {
    std::string label;
    std::string query;
    std::string image;
    std::string database;
    std::vector<EvalRecord> records;
    MethodSummary summary;
    std::vector<LevelAccuracyRow> levels;
    std::vector<TruncationRow> truncation;
};

/// Splits `label` into query/image/database columns when it is a method
/// label; otherwise the whole label goes in the query column.
MethodReport evaluate_method(std::string label, std::span<const PredictionPair> pairs, std::size_t max_level = 9,
                             std::size_t max_k = 4);

struct CorpusReport {
    std::vector<MethodReport> methods;
    std::size_t max_level = 9;
    std::size_t max_k = 4;
};

/// Reals are rounded to 12 significant digits so output is byte-stable.
nlohmann::json to_json(const CorpusReport& report, bool include_records = true);

/// Aligned text tables: averages, match types, level accuracy, truncation.
std::string render_text(const CorpusReport& report);

}  // namespace iconrag
