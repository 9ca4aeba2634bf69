#include "iconrag/providers/embedding.hpp"

#include <cmath>
#include <fstream>
#include <mutex>

#include "iconrag/error.hpp"
#include "iconrag/retrieval/vector_index.hpp"
#include "iconrag/util/text.hpp"

namespace iconrag {

std::uint64_t stable_hash64(std::string_view data, std::uint64_t seed) noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL ^ seed;
    for (const char c : data) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    h ^= h >> 33;
    h *= 0xff51afd7ed558ccdULL;
    h ^= h >> 33;
    h *= 0xc4ceb9fe1a85ec53ULL;
    h ^= h >> 33;
    return h;
}

Embedding offline_embed(std::string_view text, std::size_t dim) {
    if (dim < 16) throw Error(ErrorCode::InvalidArgument, "offline embedding dimension must be at least 16");

    std::vector<std::string> chars;
    const std::string lowered = lowercase(text);
    std::size_t pos = 0;
    while (pos < lowered.size()) {
        const std::size_t start = pos;
        next_code_point(lowered, pos);
        chars.emplace_back(lowered.substr(start, pos - start));
    }
    if (chars.size() < 3) throw Error(ErrorCode::EmptyText, "text has no character 3-grams to embed");

    Embedding v(dim, 0.0);
    for (std::size_t i = 0; i + 3 <= chars.size(); ++i) {
        const std::string gram = chars[i] + chars[i + 1] + chars[i + 2];
        const std::uint64_t h = stable_hash64(gram, kOfflineHashSeed);
        v[h % dim] += (h >> 63) != 0 ? -1.0 : 1.0;
    }
    const double norm = l2_norm(v);
    if (norm == 0.0) throw Error(ErrorCode::ZeroVector, "hashed 3-gram features cancel out to zero");
    for (auto& x : v) x /= norm;
    return v;
}

// --- OfflineHashEmbedder ---------------------------------------------------

OfflineHashEmbedder::OfflineHashEmbedder(std::size_t dim) : dim_(dim) {
    if (dim < 16) throw Error(ErrorCode::InvalidArgument, "offline embedding dimension must be at least 16");
}

std::vector<Embedding> OfflineHashEmbedder::embed(std::span<const std::string> texts) {
    std::vector<Embedding> out;
    out.reserve(texts.size());
    for (const auto& text : texts) {
        if (trim(text).empty()) throw Error(ErrorCode::EmptyText, "cannot embed empty text");
        out.push_back(offline_embed(text, dim_));
    }
    return out;
}

std::string OfflineHashEmbedder::id() const { return "offline-hash-v1/" + std::to_string(dim_); }

nlohmann::json OfflineHashEmbedder::describe() const {
    return {{"kind", "offline-hash"}, {"id", id()}, {"dim", dim_}, {"ngram", 3}, {"seed", kOfflineHashSeed}};
}

// --- RemoteEmbeddingProvider -------------------------------------------------

RemoteEmbeddingProvider::RemoteEmbeddingProvider(RemoteEndpoint endpoint, std::size_t dim, std::size_t batch_size)
    : client_(std::move(endpoint)), requested_dim_(dim), batch_size_(std::max<std::size_t>(1, batch_size)) {
    if (client_.endpoint().model.empty()) {
        throw Error(ErrorCode::InvalidArgument, "remote embedding provider needs a model name");
    }
}

std::vector<Embedding> RemoteEmbeddingProvider::embed(std::span<const std::string> texts) {
    for (const auto& text : texts) {
        if (trim(text).empty()) throw Error(ErrorCode::EmptyText, "cannot embed empty text");
    }
    std::vector<Embedding> out;
    out.reserve(texts.size());
    for (std::size_t start = 0; start < texts.size(); start += batch_size_) {
        const auto batch = texts.subspan(start, std::min(batch_size_, texts.size() - start));
        nlohmann::json body{{"model", client_.endpoint().model},
                            {"input", std::vector<std::string>(batch.begin(), batch.end())}};
        if (requested_dim_ > 0) body["dimensions"] = requested_dim_;
        const auto reply = client_.post("/embeddings", body);

        std::vector<Embedding> vectors(batch.size());
        try {
            for (const auto& item : reply.at("data")) {
                const auto index = item.value("index", std::size_t{0});
                if (index >= vectors.size()) throw Error(ErrorCode::ProviderUnavailable, "embedding index out of range");
                vectors[index] = item.at("embedding").get<Embedding>();
            }
        } catch (const nlohmann::json::exception& e) {
            throw Error(ErrorCode::ProviderUnavailable, std::string("unexpected embeddings response: ") + e.what());
        }
        for (auto& v : vectors) {
            if (v.empty()) throw Error(ErrorCode::ProviderUnavailable, "embeddings response is missing a vector");
            std::unique_lock lock(mutex_);
            const std::size_t expected = requested_dim_ > 0 ? requested_dim_ : observed_dim_;
            if (expected > 0 && v.size() != expected) {
                throw Error(ErrorCode::DimMismatch, "embedding has dimension " + std::to_string(v.size()) +
                                                        ", expected " + std::to_string(expected));
            }
            observed_dim_ = v.size();
            out.push_back(std::move(v));
        }
    }
    return out;
}

std::string RemoteEmbeddingProvider::id() const {
    std::string id = "remote:" + client_.endpoint().model;
    if (requested_dim_ > 0) id += "/" + std::to_string(requested_dim_);
    return id;
}

std::size_t RemoteEmbeddingProvider::dim() const {
    std::shared_lock lock(mutex_);
    return requested_dim_ > 0 ? requested_dim_ : observed_dim_;
}

nlohmann::json RemoteEmbeddingProvider::describe() const {
    return {{"kind", "remote"},
            {"id", id()},
            {"model", client_.endpoint().model},
            {"base_url", client_.endpoint().base_url},
            {"dim", dim()}};
}

// --- EmbeddingCache ----------------------------------------------------------

EmbeddingCache::EmbeddingCache(std::filesystem::path path) : path_(std::move(path)) {
    std::ifstream in(*path_, std::ios::binary);
    if (!in) return;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        try {
            const auto rec = nlohmann::json::parse(line);
            vectors_.insert_or_assign({rec.at("provider").get<std::string>(), rec.at("hash").get<std::string>()},
                                      rec.at("vector").get<Embedding>());
        } catch (const nlohmann::json::exception& e) {
            throw Error(ErrorCode::Format, path_->string() + " line " + std::to_string(line_no) + ": " + e.what());
        }
    }
}

std::optional<Embedding> EmbeddingCache::find(const std::string& provider_id, std::string_view text) const {
    const auto key = std::make_pair(provider_id, sha256_hex(text));
    std::shared_lock lock(mutex_);
    const auto it = vectors_.find(key);
    if (it == vectors_.end()) return std::nullopt;
    return it->second;
}

bool EmbeddingCache::put(const std::string& provider_id, std::string_view text, const Embedding& vector) {
    auto key = std::make_pair(provider_id, sha256_hex(text));
    std::unique_lock lock(mutex_);
    if (!vectors_.try_emplace(key, vector).second) return false;
    if (path_) {
        std::ofstream out(*path_, std::ios::binary | std::ios::app);
        if (!out) throw Error(ErrorCode::Io, "cannot append to cache " + path_->string());
        std::string line = R"({"provider":)" + nlohmann::json(key.first).dump() + R"(,"hash":")" + key.second +
                           R"(","vector":[)";
        for (std::size_t i = 0; i < vector.size(); ++i) {
            if (i != 0) line += ',';
            line += format_double(vector[i]);
        }
        out << line << "]}\n";
    }
    return true;
}

std::size_t EmbeddingCache::size() const {
    std::shared_lock lock(mutex_);
    return vectors_.size();
}

// --- CachedEmbeddingProvider -------------------------------------------------

CachedEmbeddingProvider::CachedEmbeddingProvider(std::shared_ptr<EmbeddingProvider> inner,
                                                 std::shared_ptr<EmbeddingCache> cache)
    : inner_(std::move(inner)), cache_(std::move(cache)) {}

std::vector<Embedding> CachedEmbeddingProvider::embed(std::span<const std::string> texts) {
    const std::string provider = inner_->id();
    std::vector<Embedding> out(texts.size());
    std::vector<std::string> misses;
    std::vector<std::size_t> miss_slots;
    for (std::size_t i = 0; i < texts.size(); ++i) {
        if (trim(texts[i]).empty()) throw Error(ErrorCode::EmptyText, "cannot embed empty text");
        if (auto hit = cache_->find(provider, texts[i])) {
            out[i] = std::move(*hit);
        } else {
            misses.push_back(texts[i]);
            miss_slots.push_back(i);
        }
    }
    if (!misses.empty()) {
        auto fresh = inner_->embed(misses);
        for (std::size_t j = 0; j < fresh.size(); ++j) {
            cache_->put(provider, misses[j], fresh[j]);
            out[miss_slots[j]] = std::move(fresh[j]);
        }
    }
    return out;
}

// --- helpers -------------------------------------------------------------------

Embedding embed_text(std::string_view text, EmbeddingProvider& provider) {
    if (trim(text).empty()) throw Error(ErrorCode::EmptyText, "cannot embed empty text");
    const std::string owned(text);
    auto vectors = provider.embed(std::span<const std::string>(&owned, 1));
    return std::move(vectors.front());
}

std::shared_ptr<EmbeddingProvider> make_embedding_provider(const EmbeddingProviderConfig& config) {
    if (config.kind == EmbeddingProviderConfig::Kind::OfflineHash) {
        return std::make_shared<OfflineHashEmbedder>(config.dim);
    }
    return std::make_shared<RemoteEmbeddingProvider>(config.endpoint, config.dim, config.batch_size);
}

}  // namespace iconrag
