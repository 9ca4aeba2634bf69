#define CPPHTTPLIB_OPENSSL_SUPPORT
#include "iconrag/providers/remote.hpp"

#include <httplib.h>

#include <algorithm>
#include <atomic>
#include <semaphore>
#include <thread>

#include "iconrag/error.hpp"

namespace iconrag {
namespace {

struct SplitUrl {
    std::string origin;  ///< scheme://host[:port]
    std::string path;    ///< without trailing slash
};

SplitUrl split_url(const std::string& url) {
    const auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) {
        throw Error(ErrorCode::InvalidArgument, "endpoint URL needs a scheme: " + url);
    }
    const auto path_start = url.find('/', scheme_end + 3);
    SplitUrl out;
    out.origin = url.substr(0, path_start);
    out.path = path_start == std::string::npos ? std::string{} : url.substr(path_start);
    while (!out.path.empty() && out.path.back() == '/') out.path.pop_back();
    return out;
}

class SlotGuard {
public:
    explicit SlotGuard(std::counting_semaphore<1024>& sem) : sem_(sem) { sem_.acquire(); }
    ~SlotGuard() { sem_.release(); }
    SlotGuard(const SlotGuard&) = delete;
    SlotGuard& operator=(const SlotGuard&) = delete;

private:
    std::counting_semaphore<1024>& sem_;
};

bool retryable(int status) { return status == 408 || status == 429 || status >= 500; }

}  // namespace

struct JsonHttpClient::Impl {
    SplitUrl url;
    std::counting_semaphore<1024> slots;
    std::atomic<std::size_t> sent{0};

    explicit Impl(const RemoteEndpoint& ep)
        : url(split_url(ep.base_url)),
          slots(static_cast<std::ptrdiff_t>(std::clamp<std::size_t>(ep.max_in_flight, 1, 1024))) {}
};

JsonHttpClient::JsonHttpClient(RemoteEndpoint endpoint)
    : endpoint_(std::move(endpoint)), impl_(std::make_unique<Impl>(endpoint_)) {}

JsonHttpClient::~JsonHttpClient() = default;

std::size_t JsonHttpClient::requests_sent() const noexcept { return impl_->sent.load(); }

nlohmann::json JsonHttpClient::post(const std::string& path, const nlohmann::json& body) {
    const std::string payload = body.dump();
    const std::string target = impl_->url.path + path;
    httplib::Headers headers;
    if (!endpoint_.api_key.empty()) headers.emplace("Authorization", "Bearer " + endpoint_.api_key);

    std::string last_error;
    auto backoff = endpoint_.initial_backoff;
    const int attempts = std::max(1, endpoint_.max_attempts);
    for (int attempt = 1; attempt <= attempts; ++attempt) {
        if (attempt > 1) {
            std::this_thread::sleep_for(backoff);
            backoff *= 2;
        }
        httplib::Result res{nullptr, httplib::Error::Unknown};
        {
            SlotGuard slot(impl_->slots);
            httplib::Client client(impl_->url.origin);
            const auto secs = endpoint_.timeout.count() / 1000;
            const auto usecs = (endpoint_.timeout.count() % 1000) * 1000;
            client.set_connection_timeout(secs, usecs);
            client.set_read_timeout(secs, usecs);
            client.set_write_timeout(secs, usecs);
            ++impl_->sent;
            res = client.Post(target, headers, payload, "application/json");
        }
        if (!res) {
            last_error = "transport error: " + httplib::to_string(res.error());
            continue;
        }
        if (res->status >= 200 && res->status < 300) {
            try {
                return nlohmann::json::parse(res->body);
            } catch (const nlohmann::json::exception& e) {
                throw Error(ErrorCode::ProviderUnavailable, "endpoint returned invalid JSON: " + std::string(e.what()));
            }
        }
        last_error = "HTTP " + std::to_string(res->status) + ": " + res->body.substr(0, 300);
        if (!retryable(res->status)) break;
    }
    throw Error(ErrorCode::ProviderUnavailable,
                "request to " + impl_->url.origin + target + " failed: " + last_error);
}

}  // namespace iconrag
