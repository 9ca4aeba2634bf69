#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>

#include <nlohmann/json.hpp>

#include "iconrag/pipeline/classifier.hpp"

namespace iconrag {

/// One JSON line per item: a prediction, or an error record for an item
/// that failed. Scores are rounded to 12 significant digits.
nlohmann::json to_json(const BatchItemResult& result, const MethodSpec& method);

void write_predictions_jsonl(std::ostream& out, std::span<const BatchItemResult> results, const MethodSpec& method);

/// `image_id,predicted_code,ground_truth_code`. Failed items are left out.
void write_predictions_csv(std::ostream& out, std::span<const BatchItemResult> results);

struct PredictionPaths {
    std::filesystem::path jsonl;
    std::filesystem::path csv;
    std::filesystem::path meta;
};

/// "<out>.jsonl", "<out>.csv" and "<out>.meta.json" for an output stem;
/// a trailing .jsonl or .csv on `out` is dropped first.
PredictionPaths prediction_paths(const std::filesystem::path& out);

}  // namespace iconrag
