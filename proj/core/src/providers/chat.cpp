#include "iconrag/providers/chat.hpp"

#include <algorithm>
#include <cctype>

#include "iconrag/error.hpp"
#include "iconrag/util/text.hpp"

namespace iconrag {

RemoteChatProvider::RemoteChatProvider(RemoteEndpoint endpoint) : client_(std::move(endpoint)) {}

nlohmann::json RemoteChatProvider::request_body(const ChatRequest& request) const {
    nlohmann::json messages = nlohmann::json::array();
    if (!request.system.empty()) messages.push_back({{"role", "system"}, {"content", request.system}});

    nlohmann::json content = nlohmann::json::array();
    content.push_back({{"type", "text"}, {"text", request.user}});
    if (request.image) {
        const std::string url = "data:" + request.image->mime_type + ";base64," + base64_encode(request.image->bytes);
        content.push_back({{"type", "image_url"}, {"image_url", {{"url", url}}}});
    }
    messages.push_back({{"role", "user"}, {"content", std::move(content)}});
    return {{"model", client_.endpoint().model}, {"messages", std::move(messages)}, {"temperature", 0}};
}

std::string RemoteChatProvider::complete(const ChatRequest& request) {
    const auto reply = client_.post("/chat/completions", request_body(request));
    try {
        const auto& message = reply.at("choices").at(0).at("message");
        const auto& content = message.at("content");
        std::string text = content.is_string() ? content.get<std::string>() : std::string{};
        if (trim(text).empty()) throw Error(ErrorCode::EmptyResponse, "chat endpoint returned an empty reply");
        return text;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::ProviderUnavailable, std::string("unexpected chat response shape: ") + e.what());
    }
}

std::string mime_type_for(std::string_view filename) {
    const auto dot = filename.rfind('.');
    std::string ext = dot == std::string_view::npos ? std::string{} : std::string(filename.substr(dot + 1));
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    if (ext == "png") return "image/png";
    if (ext == "gif") return "image/gif";
    if (ext == "webp") return "image/webp";
    if (ext == "tif" || ext == "tiff") return "image/tiff";
    return "image/jpeg";
}

}  // namespace iconrag
