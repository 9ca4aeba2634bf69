#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "iconrag/providers/chat.hpp"
#include "iconrag/providers/prompts.hpp"
#include "iconrag/taxonomy/code.hpp"

namespace iconrag {

/// A retrieved entry offered to the selector, in retrieval-rank order.
struct SelectionCandidate {
    IconclassCode code;
    std::string text;
};

struct SelectionResult {
    IconclassCode code;
    std::size_t index = 0;   ///< position in the candidate list
    bool fallback = false;   ///< reply named no candidate; first one taken
    std::string response;    ///< raw model reply (empty for offline selection)
};

/// Position of the earliest candidate notation appearing in `response` as a
/// whole token; at equal positions the longer notation wins.
std::optional<std::size_t> find_candidate_in_reply(std::string_view response,
                                                   std::span<const SelectionCandidate> candidates);

/// Asks the chat model to pick one candidate. The result is always one of
/// the candidates; when the reply names none the first is taken and
/// `fallback` is set. Throws InvalidArgument for an empty candidate list.
SelectionResult select_with_llm(std::string_view description, std::span<const SelectionCandidate> candidates,
                                ChatProvider& chat, const PromptTemplates& prompts = default_prompts());

/// Deterministic stand-in: the candidate with the highest Jaccard overlap
/// between description tokens and candidate-text tokens, ties to the
/// better-ranked candidate.
SelectionResult offline_select(std::string_view description, std::span<const SelectionCandidate> candidates);

/// |A ∩ B| / |A ∪ B| over token sets; 0 when both are empty.
double jaccard(std::string_view a, std::string_view b);

}  // namespace iconrag
