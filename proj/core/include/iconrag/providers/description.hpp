#pragma once

#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <utility>

#include "iconrag/providers/chat.hpp"
#include "iconrag/providers/prompts.hpp"

namespace iconrag {

enum class DescriptionMode { FullPage, Illustration };

std::string_view to_string(DescriptionMode mode) noexcept;  ///< "page" / "illustration"
std::optional<DescriptionMode> parse_description_mode(std::string_view text) noexcept;

struct DescriptionRequest {
    std::string image_id;
    std::string image_bytes;
    DescriptionMode mode = DescriptionMode::FullPage;
    std::string mime_type = "image/jpeg";
};

struct DescriptionRecord {
    std::string image_id;
    DescriptionMode mode = DescriptionMode::FullPage;
    std::string text;
    std::string model_id;
    std::string created_at;
    std::string prompt_version;
};

nlohmann::json to_json(const DescriptionRecord& record);
DescriptionRecord description_from_json(const nlohmann::json& j);

/// Append-only JSON-lines store of descriptions keyed by (image_id, mode).
/// Without a path it lives in memory only. Lookups take a shared lock;
/// inserts serialize on an exclusive lock and append one line.
class DescriptionCache {
public:
    DescriptionCache() = default;
    explicit DescriptionCache(std::filesystem::path path);

    [[nodiscard]] std::optional<DescriptionRecord> find(const std::string& image_id, DescriptionMode mode) const;
    /// Stores the record unless the key is already present; returns
    /// whether it was inserted.
    bool put(const DescriptionRecord& record);
    [[nodiscard]] std::size_t size() const;

private:
    std::optional<std::filesystem::path> path_;
    mutable std::shared_mutex mutex_;
    std::map<std::pair<std::string, DescriptionMode>, DescriptionRecord> records_;
};

/// Returns the cached description for (image_id, mode) or asks `chat` for
/// one using the mode's prompt plus the image, then caches it. `chat` may be
/// null when only cache hits are acceptable (MissingDescription otherwise).
DescriptionRecord describe_image(const DescriptionRequest& request, ChatProvider* chat, DescriptionCache& cache,
                                 const PromptTemplates& prompts = default_prompts());

}  // namespace iconrag
