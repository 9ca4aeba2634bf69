#include "iconrag/pipeline/predictions_io.hpp"

#include <ostream>

#include "iconrag/util/csv.hpp"
#include "iconrag/util/text.hpp"

namespace iconrag {

nlohmann::json to_json(const BatchItemResult& result, const MethodSpec& method) {
    nlohmann::json j{{"image_id", result.image_id}, {"method", method.label()}};
    if (result.prediction) {
        const Prediction& p = *result.prediction;
        auto candidates = nlohmann::json::array();
        for (const auto& hit : p.candidates) {
            candidates.push_back(
                {{"rank", hit.rank}, {"code", hit.code.raw()}, {"score", round_significant(hit.score, 12)}});
        }
        j["predicted"] = p.predicted.raw();
        j["ground_truth"] = result.ground_truth;
        j["fallback"] = p.fallback;
        j["candidates"] = std::move(candidates);
        if (!p.selection_response.empty()) j["selection_response"] = p.selection_response;
    } else if (result.error) {
        j["ground_truth"] = result.ground_truth;
        j["error"] = {{"code", to_string(result.error->code)}, {"message", result.error->message}};
    }
    if (!result.group.empty()) j["group"] = result.group;
    return j;
}

void write_predictions_jsonl(std::ostream& out, std::span<const BatchItemResult> results, const MethodSpec& method) {
    for (const auto& r : results) out << to_json(r, method).dump() << '\n';
}

void write_predictions_csv(std::ostream& out, std::span<const BatchItemResult> results) {
    out << "image_id,predicted_code,ground_truth_code\n";
    for (const auto& r : results) {
        if (!r.prediction) continue;
        out << csv_field(r.image_id) << ',' << csv_field(r.prediction->predicted.raw()) << ','
            << csv_field(r.ground_truth) << '\n';
    }
}

PredictionPaths prediction_paths(const std::filesystem::path& out) {
    std::filesystem::path stem = out;
    if (stem.extension() == ".jsonl" || stem.extension() == ".csv") stem.replace_extension();
    const auto with = [&](const char* suffix) {
        std::filesystem::path p = stem;
        p += suffix;
        return p;
    };
    return {with(".jsonl"), with(".csv"), with(".meta.json")};
}

}  // namespace iconrag
