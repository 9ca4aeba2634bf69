#pragma once

#include <memory>
#include <optional>
#include <string>

#include "iconrag/providers/remote.hpp"

namespace iconrag {

struct ImageAttachment {
    std::string bytes;
    std::string mime_type = "image/jpeg";
};

struct ChatRequest {
    std::string system;
    std::string user;
    std::optional<ImageAttachment> image;
};

/// A text-generation backend. Implementations must be callable from
/// several threads at once.
class ChatProvider {
public:
    virtual ~ChatProvider() = default;
    /// Returns the model's reply text. Throws ProviderUnavailable.
    virtual std::string complete(const ChatRequest& request) = 0;
    [[nodiscard]] virtual std::string model_id() const = 0;
};

/// Chat completions over the OpenAI-compatible protocol; images travel as
/// base64 data URLs.
class RemoteChatProvider final : public ChatProvider {
public:
    explicit RemoteChatProvider(RemoteEndpoint endpoint);

    std::string complete(const ChatRequest& request) override;
    [[nodiscard]] std::string model_id() const override { return client_.endpoint().model; }
    [[nodiscard]] std::size_t requests_sent() const noexcept { return client_.requests_sent(); }

    /// The request body sent for `request`; exposed for inspection.
    [[nodiscard]] nlohmann::json request_body(const ChatRequest& request) const;

private:
    JsonHttpClient client_;
};

/// Guesses an image MIME type from a file extension; defaults to JPEG.
std::string mime_type_for(std::string_view filename);

}  // namespace iconrag
