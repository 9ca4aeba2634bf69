#include "iconrag/providers/description.hpp"

#include <fstream>

#include "iconrag/error.hpp"
#include "iconrag/util/clock.hpp"
#include "iconrag/util/text.hpp"

namespace iconrag {

std::string_view to_string(DescriptionMode mode) noexcept {
    return mode == DescriptionMode::FullPage ? "page" : "illustration";
}

std::optional<DescriptionMode> parse_description_mode(std::string_view text) noexcept {
    if (text == "page" || text == "full-page") return DescriptionMode::FullPage;
    if (text == "illustration") return DescriptionMode::Illustration;
    return std::nullopt;
}

nlohmann::json to_json(const DescriptionRecord& record) {
    return {{"image_id", record.image_id},         {"mode", to_string(record.mode)},
            {"text", record.text},                 {"model_id", record.model_id},
            {"created_at", record.created_at},     {"prompt_version", record.prompt_version}};
}

DescriptionRecord description_from_json(const nlohmann::json& j) {
    DescriptionRecord record;
    record.image_id = j.at("image_id").get<std::string>();
    const auto mode = parse_description_mode(j.at("mode").get<std::string>());
    if (!mode) throw Error(ErrorCode::Format, "unknown description mode in cache record");
    record.mode = *mode;
    record.text = j.at("text").get<std::string>();
    record.model_id = j.value("model_id", std::string{});
    record.created_at = j.value("created_at", std::string{});
    record.prompt_version = j.value("prompt_version", std::string{});
    return record;
}

DescriptionCache::DescriptionCache(std::filesystem::path path) : path_(std::move(path)) {
    std::ifstream in(*path_, std::ios::binary);
    if (!in) return;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        try {
            auto record = description_from_json(nlohmann::json::parse(line));
            auto key = std::make_pair(record.image_id, record.mode);
            records_.insert_or_assign(std::move(key), std::move(record));
        } catch (const nlohmann::json::exception& e) {
            throw Error(ErrorCode::Format,
                        path_->string() + " line " + std::to_string(line_no) + ": " + e.what());
        }
    }
}

std::optional<DescriptionRecord> DescriptionCache::find(const std::string& image_id, DescriptionMode mode) const {
    std::shared_lock lock(mutex_);
    const auto it = records_.find({image_id, mode});
    if (it == records_.end()) return std::nullopt;
    return it->second;
}

bool DescriptionCache::put(const DescriptionRecord& record) {
    if (trim(record.text).empty()) throw Error(ErrorCode::EmptyText, "refusing to cache an empty description");
    std::unique_lock lock(mutex_);
    if (!records_.try_emplace({record.image_id, record.mode}, record).second) return false;
    if (path_) {
        std::ofstream out(*path_, std::ios::binary | std::ios::app);
        if (!out) throw Error(ErrorCode::Io, "cannot append to cache " + path_->string());
        out << to_json(record).dump() << '\n';
    }
    return true;
}

std::size_t DescriptionCache::size() const {
    std::shared_lock lock(mutex_);
    return records_.size();
}

DescriptionRecord describe_image(const DescriptionRequest& request, ChatProvider* chat, DescriptionCache& cache,
                                 const PromptTemplates& prompts) {
    if (auto hit = cache.find(request.image_id, request.mode)) return *hit;
    if (chat == nullptr) {
        throw Error(ErrorCode::MissingDescription,
                    "no cached " + std::string(to_string(request.mode)) + " description for " + request.image_id +
                        " and no chat provider configured");
    }
    if (request.image_bytes.empty()) {
        throw Error(ErrorCode::InvalidArgument, "image " + request.image_id + " has no bytes to describe");
    }

    ChatRequest chat_request;
    chat_request.system = prompts.system;
    chat_request.user = request.mode == DescriptionMode::FullPage ? prompts.full_page : prompts.illustration;
    chat_request.image = ImageAttachment{request.image_bytes, request.mime_type};

    std::string text;
    try {
        text = chat->complete(chat_request);
    } catch (const Error& e) {
        throw Error(e.code(), request.image_id + ": " + e.what());
    }
    if (trim(text).empty()) throw Error(ErrorCode::EmptyResponse, request.image_id + ": empty description");

    DescriptionRecord record{request.image_id, request.mode, std::string(trim(text)), chat->model_id(),
                             utc_timestamp(), prompts.version};
    cache.put(record);
    return record;
}

}  // namespace iconrag
