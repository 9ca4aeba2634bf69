#pragma once

#include <chrono>
#include <cstddef>
#include <memory>
#include <string>

#include <nlohmann/json.hpp>

namespace iconrag {

/// Connection settings for an OpenAI-compatible HTTP endpoint.
struct RemoteEndpoint {
    std::string base_url = "https://api.openai.com/v1";
    std::string api_key;
    std::string model;
    std::chrono::milliseconds timeout{60'000};
    int max_attempts = 3;
    std::chrono::milliseconds initial_backoff{500};
    std::size_t max_in_flight = 4;
};

/// POSTs JSON bodies with bounded concurrency and exponential-backoff
/// retries on transport failures, 429 and 5xx responses. Thread-safe.
class JsonHttpClient {
public:
    explicit JsonHttpClient(RemoteEndpoint endpoint);
    ~JsonHttpClient();
    JsonHttpClient(const JsonHttpClient&) = delete;
    JsonHttpClient& operator=(const JsonHttpClient&) = delete;

    /// `path` is appended to the base URL path, e.g. "/embeddings".
    /// Throws ProviderUnavailable once attempts are exhausted or on a
    /// non-retryable status.
    nlohmann::json post(const std::string& path, const nlohmann::json& body);

    [[nodiscard]] const RemoteEndpoint& endpoint() const noexcept { return endpoint_; }
    /// HTTP requests issued so far, retries included.
    [[nodiscard]] std::size_t requests_sent() const noexcept;

private:
    struct Impl;
    RemoteEndpoint endpoint_;
    std::unique_ptr<Impl> impl_;
};

}  // namespace iconrag
