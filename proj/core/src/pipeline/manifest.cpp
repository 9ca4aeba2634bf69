#include "iconrag/pipeline/manifest.hpp"

#include <fstream>
#include <iterator>
#include <map>
#include <set>
#include <sstream>

#include "iconrag/error.hpp"
#include "iconrag/util/csv.hpp"
#include "iconrag/util/text.hpp"

namespace iconrag {
namespace fs = std::filesystem;
namespace {

[[noreturn]] void parse_error(const fs::path& path, std::size_t record, const std::string& why) {
    throw Error(ErrorCode::ManifestParse,
                path.string() + (record > 0 ? " record " + std::to_string(record) : std::string{}) + ": " + why);
}

fs::path resolve(const fs::path& base, const std::string& value) {
    if (trim(value).empty()) return {};
    const fs::path p(std::string(trim(value)));
    return p.is_absolute() ? p : base / p;
}

ManifestItem from_fields(const std::map<std::string, std::string>& fields, const fs::path& base,
                         const fs::path& path, std::size_t record) {
    const auto get = [&](const char* key) -> std::string {
        const auto it = fields.find(key);
        return it == fields.end() ? std::string{} : it->second;
    };
    ManifestItem item;
    item.image_id = std::string(trim(get("image_id")));
    if (item.image_id.empty()) parse_error(path, record, "missing image_id");
    item.page_image_path = resolve(base, get("page_image_path"));
    item.illustration_image_path = resolve(base, get("illustration_image_path"));
    item.ground_truth = std::string(trim(get("ground_truth")));
    item.vector_path = resolve(base, get("vector_path"));
    item.group = std::string(trim(get("group")));
    item.description = std::string(trim(get("description")));
    item.page_description = std::string(trim(get("page_description")));
    item.illustration_description = std::string(trim(get("illustration_description")));
    return item;
}

}  // namespace

const std::string& ManifestItem::supplied_description(DescriptionMode mode) const noexcept {
    const std::string& specific = mode == DescriptionMode::FullPage ? page_description : illustration_description;
    return specific.empty() ? description : specific;
}

std::vector<ManifestItem> load_manifest(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) parse_error(path, 0, "cannot open manifest");
    const std::string data{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
    if (!is_valid_utf8(data)) parse_error(path, 0, "manifest is not valid UTF-8");
    const fs::path base = path.parent_path();

    const auto ext = path.extension().string();
    const std::string_view body = trim(data);
    const bool json_lines = ext == ".jsonl" || ext == ".json" || (!body.empty() && body.front() == '{');

    std::vector<ManifestItem> items;
    std::set<std::string> seen;
    const auto push = [&](ManifestItem item, std::size_t record) {
        if (!seen.insert(item.image_id).second) parse_error(path, record, "duplicate image_id " + item.image_id);
        items.push_back(std::move(item));
    };

    if (json_lines) {
        std::istringstream lines(data);
        std::string line;
        std::size_t record = 0;
        while (std::getline(lines, line)) {
            if (trim(line).empty()) continue;
            ++record;
            nlohmann::json rec;
            try {
                rec = nlohmann::json::parse(line);
            } catch (const nlohmann::json::exception& e) {
                parse_error(path, record, e.what());
            }
            if (!rec.is_object()) parse_error(path, record, "expected a JSON object");
            std::map<std::string, std::string> fields;
            for (const auto& [key, value] : rec.items()) {
                if (value.is_string()) {
                    fields[key] = value.get<std::string>();
                } else if (!value.is_null()) {
                    fields[key] = value.dump();
                }
            }
            push(from_fields(fields, base, path, record), record);
        }
        return items;
    }

    std::istringstream csv(data);
    std::vector<CsvRow> rows;
    try {
        rows = read_csv(csv);
    } catch (const Error& e) {
        parse_error(path, 0, e.what());
    }
    if (rows.empty()) return items;
    CsvRow header = rows.front();
    for (auto& h : header) h = std::string(trim(h));
    if (!header.empty() && header.front().starts_with("\xEF\xBB\xBF")) header.front().erase(0, 3);
    if (std::find(header.begin(), header.end(), "image_id") == header.end()) {
        parse_error(path, 0, "CSV header must name an image_id column");
    }
    for (std::size_t r = 1; r < rows.size(); ++r) {
        if (rows[r].size() != header.size()) {
            parse_error(path, r, "expected " + std::to_string(header.size()) + " fields, found " +
                                     std::to_string(rows[r].size()));
        }
        std::map<std::string, std::string> fields;
        for (std::size_t c = 0; c < header.size(); ++c) fields[header[c]] = rows[r][c];
        push(from_fields(fields, base, path, r), r);
    }
    return items;
}

Embedding load_vector_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::Io, "cannot open vector file " + path.string());
    try {
        const auto j = nlohmann::json::parse(in);
        const auto& arr = j.is_object() ? j.at("vector") : j;
        return arr.get<Embedding>();
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::Format, path.string() + ": " + e.what());
    }
}

std::string read_binary_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace iconrag
