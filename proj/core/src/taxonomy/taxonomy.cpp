#include "iconrag/taxonomy/taxonomy.hpp"

#include <fstream>
#include <istream>

#include <nlohmann/json.hpp>

#include "iconrag/error.hpp"
#include "iconrag/util/text.hpp"

namespace iconrag {
namespace {

[[noreturn]] void malformed_line(std::size_t line_no, const std::string& why) {
    throw Error(ErrorCode::MalformedLine, "line " + std::to_string(line_no) + ": " + why);
}

struct RawRow {
    std::string code;
    std::string text;
};

RawRow split_tsv(std::string_view line, std::size_t line_no) {
    const auto tab = line.find('\t');
    if (tab == std::string_view::npos) malformed_line(line_no, "missing tab separator");
    return {std::string(line.substr(0, tab)), std::string(line.substr(tab + 1))};
}

RawRow split_json(std::string_view line, std::size_t line_no) {
    nlohmann::json record;
    try {
        record = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
        malformed_line(line_no, std::string("invalid JSON: ") + e.what());
    }
    if (!record.is_object()) malformed_line(line_no, "expected a JSON object");

    RawRow row;
    const auto code = record.contains("code") ? record.find("code") : record.find("n");
    if (code == record.end() || !code->is_string()) malformed_line(line_no, "missing string field 'code'");
    row.code = code->get<std::string>();

    const auto txt = record.find("txt");
    if (txt == record.end()) malformed_line(line_no, "missing field 'txt'");
    if (txt->is_string()) {
        row.text = txt->get<std::string>();
    } else if (txt->is_object() && txt->contains("en") && (*txt)["en"].is_string()) {
        row.text = (*txt)["en"].get<std::string>();
    } else {
        malformed_line(line_no, "field 'txt' must be a string or carry an 'en' string");
    }
    return row;
}

}  // namespace

void Taxonomy::add(TaxonomyEntry entry) {
    if (!accepts(entry.code)) {
        throw Error(ErrorCode::InvalidArgument, "code " + entry.code.raw() + " is outside the prefix filter");
    }
    entry.text = std::string(trim(entry.text));
    if (entry.text.empty()) {
        throw Error(ErrorCode::InvalidArgument, "code " + entry.code.raw() + " has an empty description");
    }
    const std::string key = entry.code.raw();
    if (!entries_.try_emplace(key, std::move(entry)).second) {
        throw Error(ErrorCode::DuplicateCode, "duplicate code " + key);
    }
}

bool Taxonomy::accepts(const IconclassCode& code) const noexcept {
    if (prefix_filter_.empty()) return true;
    for (const auto& prefix : prefix_filter_) {
        if (code.raw().starts_with(prefix)) return true;
    }
    return false;
}

const TaxonomyEntry* Taxonomy::find(std::string_view raw) const noexcept {
    const auto it = entries_.find(raw);
    return it == entries_.end() ? nullptr : &it->second;
}

const TaxonomyEntry& Taxonomy::at(std::string_view raw) const {
    if (const auto* entry = find(raw)) return *entry;
    throw Error(ErrorCode::UnknownDoc, "code " + std::string(raw) + " is not in the taxonomy");
}

LoadedTaxonomy load_taxonomy(std::istream& in, std::vector<std::string> prefix_filter) {
    LoadedTaxonomy out{Taxonomy(std::move(prefix_filter)), {}};
    auto& stats = out.stats;

    enum class Format { Unknown, Tsv, JsonLines } format = Format::Unknown;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view view = line;
        if (!view.empty() && view.back() == '\r') view.remove_suffix(1);
        if (line_no == 1 && view.starts_with("\xEF\xBB\xBF")) view.remove_prefix(3);
        if (!is_valid_utf8(view)) malformed_line(line_no, "invalid UTF-8");
        if (trim(view).empty()) {
            ++stats.blank;
            continue;
        }
        if (format == Format::Unknown) {
            format = trim(view).front() == '{' ? Format::JsonLines : Format::Tsv;
        }

        const RawRow row = format == Format::Tsv ? split_tsv(view, line_no) : split_json(view, line_no);
        std::optional<IconclassCode> code;
        try {
            code = IconclassCode::parse(row.code);
        } catch (const Error& e) {
            malformed_line(line_no, e.what());
        }
        if (trim(row.text).empty()) malformed_line(line_no, "empty description for " + code->raw());
        if (!out.taxonomy.accepts(*code)) {
            ++stats.filtered;
            continue;
        }
        try {
            out.taxonomy.add({std::move(*code), row.text});
        } catch (const Error& e) {
            if (e.code() != ErrorCode::DuplicateCode) throw;
            throw Error(ErrorCode::DuplicateCode, "line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    stats.lines = line_no;
    stats.entries = out.taxonomy.size();
    if (stats.entries == 0) {
        stats.warnings.push_back(line_no == 0 ? "taxonomy input is empty"
                                              : "no entries matched the prefix filter");
    }
    return out;
}

LoadedTaxonomy load_taxonomy_file(const std::filesystem::path& path, std::vector<std::string> prefix_filter) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::Io, "cannot open taxonomy file " + path.string());
    return load_taxonomy(in, std::move(prefix_filter));
}

std::string render_basic_doc(const TaxonomyEntry& entry) { return std::string(trim(entry.text)); }

std::string render_hierarchical_doc_lenient(const TaxonomyEntry& entry, const Taxonomy& taxonomy,
                                            std::vector<std::string>* missing) {
    std::string doc;
    const auto& segments = entry.code.segments();
    for (std::size_t i = 0; i + 1 < segments.size(); ++i) {
        const auto* ancestor = taxonomy.find(segments[i]);
        if (ancestor == nullptr) {
            if (missing != nullptr) missing->push_back(segments[i]);
            continue;
        }
        doc += render_basic_doc(*ancestor);
        doc += "; ";
    }
    doc += render_basic_doc(entry);
    return doc;
}

std::string render_hierarchical_doc(const TaxonomyEntry& entry, const Taxonomy& taxonomy) {
    std::vector<std::string> missing;
    std::string doc = render_hierarchical_doc_lenient(entry, taxonomy, &missing);
    if (!missing.empty()) {
        std::string list;
        for (const auto& code : missing) list += (list.empty() ? "" : ", ") + code;
        throw Error(ErrorCode::MissingAncestor,
                    "entry " + entry.code.raw() + " is missing ancestors: " + list);
    }
    return doc;
}

std::string_view to_string(DatabaseKind kind) noexcept {
    return kind == DatabaseKind::Basic ? "basic" : "hierarchical";
}

std::optional<DatabaseKind> parse_database_kind(std::string_view text) noexcept {
    if (text == "basic") return DatabaseKind::Basic;
    if (text == "hierarchical") return DatabaseKind::Hierarchical;
    return std::nullopt;
}

}  // namespace iconrag
