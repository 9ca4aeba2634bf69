#include "iconrag/providers/prompts.hpp"

#include <fstream>

#include "iconrag/error.hpp"
#include "iconrag/providers/select.hpp"

namespace iconrag {
namespace {

void replace_all(std::string& text, std::string_view needle, std::string_view value) {
    std::size_t pos = 0;
    while ((pos = text.find(needle, pos)) != std::string::npos) {
        text.replace(pos, needle.size(), value);
        pos += value.size();
    }
}

}  // namespace

const PromptTemplates& default_prompts() {
    static const PromptTemplates prompts{
        "woodcut-v1",
        "You are an art historian cataloguing woodcut illustrations from early modern Bibles and "
        "religious books printed in the Holy Roman Empire.",
        "The attached image is a full page from an early modern Bible or religious book that contains a "
        "woodcut illustration. Describe the scene shown in the woodcut in detail: the figures, their "
        "actions, gestures and attributes, the objects and the setting. Use the surrounding text, "
        "headings, chapter numbers, captions and any other contextual elements on the page to identify "
        "the biblical or religious subject, and transcribe text that helps identify it.",
        "The attached image is a woodcut illustration cropped from an early modern Bible or religious "
        "book. Describe the scene in detail: the figures, their actions, gestures and attributes, the "
        "objects and the setting, and identify the biblical or religious subject if you can. Base the "
        "description only on what is visible in the illustration itself; do not refer to any page, "
        "surrounding text, heading or other context outside the image.",
        "Below is a description of a woodcut illustration from an early modern Bible or religious book, "
        "followed by candidate Iconclass entries retrieved for it.\n\n"
        "Description:\n{description}\n\n"
        "Candidates:\n{candidates}\n\n"
        "Select the single candidate that best matches the described image. Reply with its Iconclass "
        "notation exactly as written above and nothing else.",
    };
    return prompts;
}

PromptTemplates load_prompts(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::Io, "cannot open prompt file " + path.string());
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::Format, path.string() + ": " + e.what());
    }
    PromptTemplates out = default_prompts();
    const auto take = [&](const char* key, std::string& field) {
        if (j.contains(key)) field = j.at(key).get<std::string>();
    };
    take("version", out.version);
    take("system", out.system);
    take("full_page", out.full_page);
    take("illustration", out.illustration);
    take("selection", out.selection);
    return out;
}

nlohmann::json to_json(const PromptTemplates& prompts) {
    return {{"version", prompts.version},
            {"system", prompts.system},
            {"full_page", prompts.full_page},
            {"illustration", prompts.illustration},
            {"selection", prompts.selection}};
}

std::string render_selection_prompt(const PromptTemplates& prompts, std::string_view description,
                                    std::span<const SelectionCandidate> candidates) {
    std::string list;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        list += std::to_string(i + 1) + ". " + candidates[i].code.raw() + ": " + candidates[i].text + "\n";
    }
    if (!list.empty()) list.pop_back();
    std::string prompt = prompts.selection;
    replace_all(prompt, "{candidates}", list);
    replace_all(prompt, "{description}", description);
    return prompt;
}

}  // namespace iconrag
