#include "iconrag/retrieval/index_store.hpp"

#include <fstream>
#include <sstream>

#include "iconrag/error.hpp"
#include "iconrag/util/text.hpp"

namespace iconrag {
namespace fs = std::filesystem;
namespace {

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
    out << content;
    if (!out) throw Error(ErrorCode::Io, "write failed for " + path.string());
}

nlohmann::json read_json(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::MissingIndex, "missing index file " + path.string());
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::Format, path.string() + ": " + e.what());
    }
}

nlohmann::json keyword_json(const KeywordIndex& index) {
    nlohmann::json ids = nlohmann::json::array();
    for (const auto& id : index.doc_ids()) ids.push_back(id.raw());
    nlohmann::json postings = nlohmann::json::object();
    for (const auto& [term, list] : index.postings()) {
        auto& arr = postings[term] = nlohmann::json::array();
        for (const auto& p : list) arr.push_back({p.doc, p.tf});
    }
    return {
        {"params", {{"k1", index.params().k1}, {"b", index.params().b}}},
        {"doc_ids", std::move(ids)},
        {"doc_lengths", index.doc_lengths()},
        {"postings", std::move(postings)},
    };
}

KeywordIndex keyword_from_json(const nlohmann::json& j) {
    try {
        Bm25Params params{j.at("params").at("k1").get<double>(), j.at("params").at("b").get<double>()};
        std::vector<IconclassCode> ids;
        for (const auto& id : j.at("doc_ids")) ids.push_back(IconclassCode::parse(id.get<std::string>()));
        auto lengths = j.at("doc_lengths").get<std::vector<std::uint32_t>>();
        KeywordIndex::PostingMap postings;
        for (const auto& [term, arr] : j.at("postings").items()) {
            auto& list = postings[term];
            for (const auto& p : arr) list.push_back({p.at(0).get<std::uint32_t>(), p.at(1).get<std::uint32_t>()});
        }
        return KeywordIndex::from_parts(params, std::move(ids), std::move(lengths), std::move(postings));
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::Format, std::string("keyword.json: ") + e.what());
    }
}

}  // namespace

nlohmann::json meta_json(const SearchIndex& index) {
    return {
        {"format", kIndexFormat},
        {"database", index.meta.database},
        {"params", {{"k1", index.keyword.params().k1}, {"b", index.keyword.params().b}}},
        {"doc_count", index.keyword.doc_count()},
        {"avg_doc_length", index.keyword.avg_doc_length()},
        {"dim", index.vectors ? index.vectors->dim() : 0},
        {"embedder", index.meta.embedder},
        {"created_at", index.meta.created_at},
        {"config", index.meta.config},
    };
}

void save_index(const fs::path& dir, const SearchIndex& index) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw Error(ErrorCode::Io, "cannot create index directory " + dir.string() + ": " + ec.message());

    write_file(dir / "meta.json", meta_json(index).dump(2) + "\n");
    write_file(dir / "keyword.json", keyword_json(index.keyword).dump() + "\n");

    std::string lines;
    if (index.vectors) {
        const auto& vec = *index.vectors;
        for (std::size_t i = 0; i < vec.size(); ++i) {
            lines += R"({"id":)" + nlohmann::json(vec.ids()[i].raw()).dump() + R"(,"vector":[)";
            const auto row = vec.row(i);
            for (std::size_t d = 0; d < row.size(); ++d) {
                if (d != 0) lines += ',';
                lines += format_double(row[d]);
            }
            lines += "]}\n";
        }
    }
    write_file(dir / "vectors.jsonl", lines);
}

SearchIndex load_index(const fs::path& dir) {
    if (!fs::is_directory(dir)) throw Error(ErrorCode::MissingIndex, "index directory " + dir.string() + " not found");
    const auto meta = read_json(dir / "meta.json");
    if (meta.value("format", std::string{}) != kIndexFormat) {
        throw Error(ErrorCode::Format, "meta.json: unsupported index format");
    }
    auto keyword = keyword_from_json(read_json(dir / "keyword.json"));

    std::optional<VectorIndex> vectors;
    const auto dim = meta.value("dim", std::size_t{0});
    if (dim > 0) {
        std::ifstream in(dir / "vectors.jsonl", std::ios::binary);
        if (!in) throw Error(ErrorCode::MissingIndex, "missing index file " + (dir / "vectors.jsonl").string());
        vectors.emplace(dim);
        std::string line;
        std::size_t line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            if (line.empty()) continue;
            try {
                const auto rec = nlohmann::json::parse(line);
                vectors->add(IconclassCode::parse(rec.at("id").get<std::string>()),
                             rec.at("vector").get<std::vector<double>>());
            } catch (const nlohmann::json::exception& e) {
                throw Error(ErrorCode::Format, "vectors.jsonl line " + std::to_string(line_no) + ": " + e.what());
            }
        }
        if (vectors->size() != keyword.doc_count()) {
            throw Error(ErrorCode::Format, "vectors.jsonl holds " + std::to_string(vectors->size()) +
                                               " rows, keyword index holds " + std::to_string(keyword.doc_count()));
        }
        for (const auto& id : keyword.doc_ids()) {
            if (!vectors->index_of(id.raw())) {
                throw Error(ErrorCode::Format, "vectors.jsonl lacks document " + id.raw());
            }
        }
    }

    IndexMeta info;
    info.database = meta.value("database", std::string{});
    info.embedder = meta.value("embedder", nlohmann::json{});
    info.created_at = meta.value("created_at", std::string{});
    info.config = meta.value("config", nlohmann::json{});
    return {std::move(info), std::move(keyword), std::move(vectors)};
}

}  // namespace iconrag
