#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "iconrag/providers/remote.hpp"

namespace iconrag {

using Embedding = std::vector<double>;

/// Stable 64-bit FNV-1a over `data` with a seeded offset, passed through a
/// murmur3 finalizer. Identical on every platform.
std::uint64_t stable_hash64(std::string_view data, std::uint64_t seed) noexcept;

inline constexpr std::uint64_t kOfflineHashSeed = 0x1C0C1A55'5EEDULL;
inline constexpr std::size_t kDefaultOfflineDim = 256;

/// Signed feature hashing of lowercase character 3-grams, L2-normalized.
/// Throws EmptyText when the text has no 3-gram and ZeroVector when the
/// signed buckets cancel out; InvalidArgument for dim < 16.
Embedding offline_embed(std::string_view text, std::size_t dim = kDefaultOfflineDim);

/// A text-embedding backend. Implementations must be thread-safe.
class EmbeddingProvider {
public:
    virtual ~EmbeddingProvider() = default;
    /// One vector per input text, in input order. Throws EmptyText for a
    /// blank input and ProviderUnavailable on remote failure.
    virtual std::vector<Embedding> embed(std::span<const std::string> texts) = 0;
    /// Identity used for cache keys and index compatibility checks.
    [[nodiscard]] virtual std::string id() const = 0;
    [[nodiscard]] virtual std::size_t dim() const = 0;
    [[nodiscard]] virtual nlohmann::json describe() const = 0;
};

class OfflineHashEmbedder final : public EmbeddingProvider {
public:
    explicit OfflineHashEmbedder(std::size_t dim = kDefaultOfflineDim);
    std::vector<Embedding> embed(std::span<const std::string> texts) override;
    [[nodiscard]] std::string id() const override;
    [[nodiscard]] std::size_t dim() const override { return dim_; }
    [[nodiscard]] nlohmann::json describe() const override;

private:
    std::size_t dim_;
};

/// OpenAI-compatible /embeddings client. `dim` of 0 accepts whatever the
/// model returns (fixed after the first reply); otherwise it is sent as the
/// requested dimension and enforced.
class RemoteEmbeddingProvider final : public EmbeddingProvider {
public:
    RemoteEmbeddingProvider(RemoteEndpoint endpoint, std::size_t dim = 0, std::size_t batch_size = 64);
    std::vector<Embedding> embed(std::span<const std::string> texts) override;
    [[nodiscard]] std::string id() const override;
    [[nodiscard]] std::size_t dim() const override;
    [[nodiscard]] nlohmann::json describe() const override;
    [[nodiscard]] std::size_t requests_sent() const noexcept { return client_.requests_sent(); }

private:
    JsonHttpClient client_;
    std::size_t requested_dim_;
    std::size_t batch_size_;
    mutable std::shared_mutex mutex_;
    std::size_t observed_dim_ = 0;
};

/// Append-only JSON-lines cache of embeddings keyed by (provider id,
/// SHA-256 of the text).
class EmbeddingCache {
public:
    EmbeddingCache() = default;
    explicit EmbeddingCache(std::filesystem::path path);

    [[nodiscard]] std::optional<Embedding> find(const std::string& provider_id, std::string_view text) const;
    bool put(const std::string& provider_id, std::string_view text, const Embedding& vector);
    [[nodiscard]] std::size_t size() const;

private:
    std::optional<std::filesystem::path> path_;
    mutable std::shared_mutex mutex_;
    std::map<std::pair<std::string, std::string>, Embedding> vectors_;
};

/// Decorator that consults an EmbeddingCache before the wrapped provider
/// and only forwards the misses.
class CachedEmbeddingProvider final : public EmbeddingProvider {
public:
    CachedEmbeddingProvider(std::shared_ptr<EmbeddingProvider> inner, std::shared_ptr<EmbeddingCache> cache);
    std::vector<Embedding> embed(std::span<const std::string> texts) override;
    [[nodiscard]] std::string id() const override { return inner_->id(); }
    [[nodiscard]] std::size_t dim() const override { return inner_->dim(); }
    [[nodiscard]] nlohmann::json describe() const override { return inner_->describe(); }

private:
    std::shared_ptr<EmbeddingProvider> inner_;
    std::shared_ptr<EmbeddingCache> cache_;
};

/// Embeds a single text. Throws EmptyText for blank input.
Embedding embed_text(std::string_view text, EmbeddingProvider& provider);

struct EmbeddingProviderConfig {
    enum class Kind { Remote, OfflineHash } kind = Kind::OfflineHash;
    RemoteEndpoint endpoint;              ///< remote only
    std::size_t dim = kDefaultOfflineDim; ///< offline: >= 16; remote: 0 = model default
    std::size_t batch_size = 64;
};

/// Builds the configured provider, validating the configuration.
std::shared_ptr<EmbeddingProvider> make_embedding_provider(const EmbeddingProviderConfig& config);

}  // namespace iconrag
