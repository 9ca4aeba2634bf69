#include "iconrag/taxonomy/documents.hpp"

#include <fstream>

#include <nlohmann/json.hpp>

#include "iconrag/error.hpp"
#include "iconrag/util/text.hpp"

namespace iconrag {

void TaxonomyDocuments::add(RenderedEntry entry) {
    if (!lookup_.emplace(entry.code.raw(), entries_.size()).second) {
        throw Error(ErrorCode::DuplicateCode, "duplicate code " + entry.code.raw());
    }
    entries_.push_back(std::move(entry));
}

TaxonomyDocuments TaxonomyDocuments::render(const Taxonomy& taxonomy, bool lenient, std::vector<std::string>* warnings) {
    TaxonomyDocuments out;
    out.entries_.reserve(taxonomy.size());
    for (const auto& [raw, entry] : taxonomy.entries()) {
        std::string hierarchical;
        if (lenient) {
            std::vector<std::string> missing;
            hierarchical = render_hierarchical_doc_lenient(entry, taxonomy, &missing);
            if (warnings != nullptr && !missing.empty()) {
                std::string list;
                for (const auto& m : missing) list += (list.empty() ? "" : ", ") + m;
                warnings->push_back(raw + ": missing ancestors " + list);
            }
        } else {
            hierarchical = render_hierarchical_doc(entry, taxonomy);
        }
        out.add({entry.code, render_basic_doc(entry), std::move(hierarchical)});
    }
    return out;
}

TaxonomyDocuments TaxonomyDocuments::load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
    TaxonomyDocuments out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        try {
            const auto rec = nlohmann::json::parse(line);
            out.add({IconclassCode::parse(rec.at("code").get<std::string>()), rec.at("basic").get<std::string>(),
                     rec.at("hierarchical").get<std::string>()});
        } catch (const nlohmann::json::exception& e) {
            throw Error(ErrorCode::MalformedLine, path.string() + " line " + std::to_string(line_no) + ": " + e.what());
        } catch (const Error& e) {
            throw Error(ErrorCode::MalformedLine, path.string() + " line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    return out;
}

void TaxonomyDocuments::save(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
    for (const auto& entry : entries_) {
        nlohmann::json rec{{"code", entry.code.raw()}, {"basic", entry.basic}, {"hierarchical", entry.hierarchical}};
        out << rec.dump() << '\n';
    }
}

const RenderedEntry* TaxonomyDocuments::find(std::string_view code) const noexcept {
    const auto it = lookup_.find(std::string(code));
    return it == lookup_.end() ? nullptr : &entries_[it->second];
}

std::vector<Document> TaxonomyDocuments::documents(DatabaseKind kind) const {
    std::vector<Document> docs;
    docs.reserve(entries_.size());
    for (const auto& entry : entries_) docs.push_back({entry.code, entry.text(kind)});
    return docs;
}

}  // namespace iconrag
