#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "iconrag/providers/description.hpp"
#include "iconrag/providers/embedding.hpp"

namespace iconrag {

/// One image to classify. Paths are resolved against the manifest's
/// directory. Pages holding several illustrations are out of scope: one
/// record means one illustration.
struct ManifestItem {
    std::string image_id;
    std::filesystem::path page_image_path;
    std::filesystem::path illustration_image_path;
    std::string ground_truth;
    std::filesystem::path vector_path;
    std::string group;
    std::string description;               ///< pre-supplied text for any mode
    std::string page_description;          ///< pre-supplied full-page text
    std::string illustration_description;  ///< pre-supplied illustration text

    /// Pre-supplied text for `mode`, preferring the mode-specific column.
    [[nodiscard]] const std::string& supplied_description(DescriptionMode mode) const noexcept;
    [[nodiscard]] const std::filesystem::path& image_path(DescriptionMode mode) const noexcept {
        return mode == DescriptionMode::FullPage ? page_image_path : illustration_image_path;
    }
};

/// Reads a CSV (header row required) or JSON-lines manifest; JSON lines are
/// recognised by a .jsonl/.json extension or a leading '{'. Columns:
/// image_id (required), page_image_path, illustration_image_path,
/// ground_truth, vector_path, group, description, page_description,
/// illustration_description. Throws ManifestParse.
std::vector<ManifestItem> load_manifest(const std::filesystem::path& path);

/// Reads a vector file: a JSON array of numbers.
Embedding load_vector_file(const std::filesystem::path& path);

std::string read_binary_file(const std::filesystem::path& path);

}  // namespace iconrag
