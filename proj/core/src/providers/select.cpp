#include "iconrag/providers/select.hpp"

#include <algorithm>
#include <set>

#include "iconrag/error.hpp"
#include "iconrag/retrieval/tokenize.hpp"

namespace iconrag {
namespace {

bool notation_char(char c) {
    return (c >= '0' && c <= '9') || (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || c == '(' || c == '+';
}

void require_candidates(std::span<const SelectionCandidate> candidates) {
    if (candidates.empty()) throw Error(ErrorCode::InvalidArgument, "selection needs at least one candidate");
}

}  // namespace

std::optional<std::size_t> find_candidate_in_reply(std::string_view response,
                                                   std::span<const SelectionCandidate> candidates) {
    std::optional<std::size_t> best;
    std::size_t best_pos = std::string_view::npos;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        const std::string& code = candidates[i].code.raw();
        for (std::size_t pos = response.find(code); pos != std::string_view::npos;
             pos = response.find(code, pos + 1)) {
            const bool left_ok = pos == 0 || !notation_char(response[pos - 1]);
            const std::size_t end = pos + code.size();
            const bool right_ok = end == response.size() || !notation_char(response[end]);
            if (!left_ok || !right_ok) continue;
            const bool better = pos < best_pos ||
                                (pos == best_pos && code.size() > candidates[*best].code.raw().size());
            if (better) {
                best = i;
                best_pos = pos;
            }
            break;
        }
    }
    return best;
}

SelectionResult select_with_llm(std::string_view description, std::span<const SelectionCandidate> candidates,
                                ChatProvider& chat, const PromptTemplates& prompts) {
    require_candidates(candidates);
    ChatRequest request;
    request.system = prompts.system;
    request.user = render_selection_prompt(prompts, description, candidates);
    std::string reply = chat.complete(request);

    if (const auto index = find_candidate_in_reply(reply, candidates)) {
        return {candidates[*index].code, *index, false, std::move(reply)};
    }
    return {candidates.front().code, 0, true, std::move(reply)};
}

double jaccard(std::string_view a, std::string_view b) {
    const auto ta = tokenize(a);
    const auto tb = tokenize(b);
    const std::set<std::string> sa(ta.begin(), ta.end());
    const std::set<std::string> sb(tb.begin(), tb.end());
    if (sa.empty() && sb.empty()) return 0.0;
    std::size_t common = 0;
    for (const auto& t : sa) common += sb.count(t);
    return static_cast<double>(common) / static_cast<double>(sa.size() + sb.size() - common);
}

SelectionResult offline_select(std::string_view description, std::span<const SelectionCandidate> candidates) {
    require_candidates(candidates);
    std::size_t best = 0;
    double best_score = -1.0;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        const double score = jaccard(description, candidates[i].text);
        if (score > best_score) {
            best = i;
            best_score = score;
        }
    }
    return {candidates[best].code, best, false, {}};
}

}  // namespace iconrag
