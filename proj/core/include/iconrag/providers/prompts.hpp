#pragma once

#include <filesystem>
#include <span>
#include <string>

#include <nlohmann/json.hpp>

namespace iconrag {

struct SelectionCandidate;

/// Versioned prompt wording. The version string travels with every
/// description record so runs can tell which wording produced a text.
struct PromptTemplates {
    std::string version;
    std::string system;
    std::string full_page;     ///< whole page: may use captions, headings, chapter numbers
    std::string illustration;  ///< cropped image: visual content only
    std::string selection;     ///< "{description}" and "{candidates}" placeholders
};

const PromptTemplates& default_prompts();

/// Reads a JSON object with the PromptTemplates field names; missing fields
/// keep their default wording.
PromptTemplates load_prompts(const std::filesystem::path& path);
nlohmann::json to_json(const PromptTemplates& prompts);

/// Fills the selection template with the description and a numbered
/// "N. CODE: text" candidate list.
std::string render_selection_prompt(const PromptTemplates& prompts, std::string_view description,
                                    std::span<const SelectionCandidate> candidates);

}  // namespace iconrag
