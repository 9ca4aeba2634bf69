#include "iconrag/evaluation/report.hpp"

#include <algorithm>
#include <fstream>

#include <fmt/format.h>

#include "iconrag/error.hpp"
#include "iconrag/pipeline/method.hpp"
#include "iconrag/util/csv.hpp"
#include "iconrag/util/text.hpp"

namespace iconrag {
namespace {

std::size_t match_slot(MatchType type) noexcept {
    return static_cast<std::size_t>(std::find(std::begin(kAllMatchTypes), std::end(kAllMatchTypes), type) -
                                    std::begin(kAllMatchTypes));
}

double mean(double sum, std::size_t n) noexcept { return n == 0 ? 0.0 : sum / static_cast<double>(n); }

double r12(double x) { return round_significant(x, 12); }

class TextTable {
public:
    explicit TextTable(std::vector<std::string> header) : rows_{std::move(header)} {}

    void add(std::vector<std::string> row) { rows_.push_back(std::move(row)); }

    void render(std::string& out) const {
        std::vector<std::size_t> width(rows_.front().size(), 0);
        for (const auto& row : rows_) {
            for (std::size_t i = 0; i < row.size(); ++i) width[i] = std::max(width[i], row[i].size());
        }
        for (std::size_t r = 0; r < rows_.size(); ++r) {
            std::string line;
            for (std::size_t i = 0; i < rows_[r].size(); ++i) {
                if (i != 0) line += "  ";
                // Left-align the three method columns, right-align numbers.
                line += i < 3 ? fmt::format("{:<{}}", rows_[r][i], width[i])
                              : fmt::format("{:>{}}", rows_[r][i], width[i]);
            }
            while (!line.empty() && line.back() == ' ') line.pop_back();
            out += line + '\n';
            if (r == 0) {
                std::size_t total = 0;
                for (auto w : width) total += w;
                out += std::string(total + 2 * (width.size() - 1), '-') + '\n';
            }
        }
    }

private:
    std::vector<std::vector<std::string>> rows_;
};

}  // namespace

std::vector<PredictionPair> read_prediction_csv(std::istream& in, const std::string& source) {
    const auto rows = read_csv(in);
    if (rows.empty()) throw Error(ErrorCode::Format, source + ": empty predictions file");
    const auto& header = rows.front();
    const auto column = [&](std::string_view name) -> std::size_t {
        const auto it = std::find_if(header.begin(), header.end(), [&](const std::string& h) { return trim(h) == name; });
        if (it == header.end()) throw Error(ErrorCode::Format, source + ": header lacks column " + std::string(name));
        return static_cast<std::size_t>(it - header.begin());
    };
    const std::size_t id_col = column("image_id");
    const std::size_t pred_col = column("predicted_code");
    const std::size_t gt_col = column("ground_truth_code");

    std::vector<PredictionPair> pairs;
    for (std::size_t r = 1; r < rows.size(); ++r) {
        const auto& row = rows[r];
        const auto field = [&](std::size_t col) -> std::string_view {
            if (col >= row.size()) {
                throw Error(ErrorCode::Format, source + " data row " + std::to_string(r) + ": missing columns");
            }
            return trim(row[col]);
        };
        const auto code = [&](std::size_t col, std::string_view what) {
            try {
                return IconclassCode::parse(field(col));
            } catch (const Error& e) {
                throw Error(ErrorCode::MalformedCode,
                            source + " data row " + std::to_string(r) + " " + std::string(what) + ": " + e.what());
            }
        };
        pairs.push_back({std::string(field(id_col)), code(pred_col, "predicted_code"),
                         code(gt_col, "ground_truth_code")});
    }
    if (pairs.empty()) throw Error(ErrorCode::Format, source + ": no prediction rows");
    return pairs;
}

std::vector<PredictionPair> read_prediction_csv_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
    return read_prediction_csv(in, path.string());
}

std::vector<EvalRecord> evaluate_pairs(std::span<const PredictionPair> pairs) {
    std::vector<EvalRecord> records;
    records.reserve(pairs.size());
    for (const auto& p : pairs) records.push_back(evaluate_pair(p.image_id, p.predicted, p.ground_truth));
    return records;
}

std::size_t MethodSummary::count_of(MatchType type) const noexcept { return match_counts[match_slot(type)]; }

MethodSummary aggregate(std::span<const EvalRecord> records) {
    MethodSummary s;
    s.count = records.size();
    double weighted = 0, precision = 0, recall = 0, f1 = 0;
    for (const auto& r : records) {
        weighted += r.weighted;
        precision += r.precision;
        recall += r.recall;
        f1 += r.f1;
        ++s.match_counts[match_slot(r.match_type)];
    }
    s.weighted = mean(weighted, s.count);
    s.precision = mean(precision, s.count);
    s.recall = mean(recall, s.count);
    s.f1 = mean(f1, s.count);
    return s;
}

std::vector<LevelAccuracyRow> level_accuracy(std::span<const EvalRecord> records, std::size_t max_level) {
    std::vector<LevelAccuracyRow> rows;
    rows.reserve(max_level);
    for (std::size_t level = 1; level <= max_level; ++level) {
        const auto objects = static_cast<std::size_t>(std::count_if(
            records.begin(), records.end(), [&](const EvalRecord& r) { return r.comparison.matched >= level; }));
        const double percent =
            records.empty() ? 0.0 : 100.0 * static_cast<double>(objects) / static_cast<double>(records.size());
        rows.push_back({level, objects, percent});
    }
    return rows;
}

std::vector<TruncationRow> truncation_report(std::span<const PredictionPair> pairs, std::size_t max_k) {
    std::vector<TruncationRow> rows;
    rows.reserve(max_k + 1);
    for (std::size_t k = 0; k <= max_k; ++k) {
        double precision = 0, recall = 0, f1 = 0, levels = 0;
        for (const auto& p : pairs) {
            const IconclassCode truncated = truncate_code(p.predicted, k);
            const auto scores = hierarchical_metrics(compare(truncated, p.ground_truth));
            precision += scores.precision;
            recall += scores.recall;
            f1 += scores.f1;
            levels += static_cast<double>(truncated.levels());
        }
        const std::size_t n = pairs.size();
        rows.push_back({k, mean(precision, n), mean(recall, n), mean(f1, n), mean(levels, n)});
    }
    return rows;
}

MethodReport evaluate_method(std::string label, std::span<const PredictionPair> pairs, std::size_t max_level,
                             std::size_t max_k) {
    MethodReport report;
    if (const auto method = parse_method_label(label)) {
        report.query = std::string(to_string(method->query_kind));
        if (method->query_kind == QueryKind::ImageVote) {
            report.image = "illustration";
            report.database = "image";
        } else {
            report.image = std::string(to_string(method->description_mode));
            report.database = std::string(to_string(method->database_kind));
        }
    } else {
        report.query = label;
    }
    report.label = std::move(label);
    report.records = evaluate_pairs(pairs);
    report.summary = aggregate(report.records);
    report.levels = level_accuracy(report.records, max_level);
    report.truncation = truncation_report(pairs, max_k);
    return report;
}

nlohmann::json to_json(const CorpusReport& report, bool include_records) {
    auto methods = nlohmann::json::array();
    for (const auto& m : report.methods) {
        nlohmann::json counts = nlohmann::json::object();
        for (const MatchType type : kAllMatchTypes) counts[std::string(to_string(type))] = m.summary.count_of(type);

        auto levels = nlohmann::json::array();
        for (const auto& row : m.levels) {
            levels.push_back({{"level", row.level}, {"objects", row.objects}, {"percent", r12(row.percent)}});
        }
        auto truncation = nlohmann::json::array();
        for (const auto& row : m.truncation) {
            truncation.push_back({{"levels_truncated", row.k},
                                  {"precision", r12(row.precision)},
                                  {"recall", r12(row.recall)},
                                  {"f1", r12(row.f1)},
                                  {"avg_levels", r12(row.avg_levels)}});
        }
        nlohmann::json j{{"label", m.label},
                         {"query", m.query},
                         {"image", m.image},
                         {"database", m.database},
                         {"count", m.summary.count},
                         {"avg_weighted", r12(m.summary.weighted)},
                         {"avg_precision", r12(m.summary.precision)},
                         {"avg_recall", r12(m.summary.recall)},
                         {"avg_f1", r12(m.summary.f1)},
                         {"match_types", std::move(counts)},
                         {"level_accuracy", std::move(levels)},
                         {"truncation", std::move(truncation)}};
        if (include_records) {
            auto records = nlohmann::json::array();
            for (const auto& r : m.records) {
                records.push_back({{"image_id", r.image_id},
                                   {"matched", r.comparison.matched},
                                   {"pred_levels", r.comparison.pred_levels},
                                   {"gt_levels", r.comparison.gt_levels},
                                   {"precision", r12(r.precision)},
                                   {"recall", r12(r.recall)},
                                   {"f1", r12(r.f1)},
                                   {"match_type", to_string(r.match_type)},
                                   {"weighted", r12(r.weighted)}});
            }
            j["records"] = std::move(records);
        }
        methods.push_back(std::move(j));
    }
    return {{"max_level", report.max_level}, {"max_k", report.max_k}, {"methods", std::move(methods)}};
}

std::string render_text(const CorpusReport& report) {
    std::string out;

    out += "Evaluation metrics\n\n";
    TextTable averages({"Query", "Image", "Database", "N", "Avg Weighted", "Avg Precision", "Avg Recall", "Avg F1"});
    for (const auto& m : report.methods) {
        averages.add({m.query, m.image, m.database, std::to_string(m.summary.count),
                      fmt::format("{:.5f}", m.summary.weighted), fmt::format("{:.4f}", m.summary.precision),
                      fmt::format("{:.4f}", m.summary.recall), fmt::format("{:.4f}", m.summary.f1)});
    }
    averages.render(out);

    out += "\nResults by match type\n\n";
    std::vector<std::string> header{"Query", "Image", "Database"};
    for (const MatchType type : kAllMatchTypes) header.emplace_back(display_name(type));
    TextTable types(std::move(header));
    for (const auto& m : report.methods) {
        std::vector<std::string> row{m.query, m.image, m.database};
        for (const MatchType type : kAllMatchTypes) row.push_back(std::to_string(m.summary.count_of(type)));
        types.add(std::move(row));
    }
    types.render(out);

    out += "\nAccuracy by classification level\n\n";
    TextTable levels({"Query", "Image", "Database", "Level", "Objects", "Percent"});
    for (const auto& m : report.methods) {
        bool first = true;
        for (const auto& row : m.levels) {
            levels.add({first ? m.query : "", first ? m.image : "", first ? m.database : "", std::to_string(row.level),
                        std::to_string(row.objects), fmt::format("{:.2f}", row.percent)});
            first = false;
        }
    }
    levels.render(out);

    out += "\nMetrics by truncation level\n\n";
    TextTable truncation(
        {"Query", "Image", "Database", "Levels Truncated", "Precision", "Recall", "F1 Score", "Avg Levels"});
    for (const auto& m : report.methods) {
        bool first = true;
        for (const auto& row : m.truncation) {
            truncation.add({first ? m.query : "", first ? m.image : "", first ? m.database : "",
                            std::to_string(row.k), fmt::format("{:.4f}", row.precision),
                            fmt::format("{:.4f}", row.recall), fmt::format("{:.4f}", row.f1),
                            fmt::format("{:.2f}", row.avg_levels)});
            first = false;
        }
    }
    truncation.render(out);
    return out;
}

}  // namespace iconrag
