#include "config.hpp"

#include <charconv>
#include <cstdlib>
#include <fstream>

#include <CLI11.hpp>

#include "iconrag/util/text.hpp"

namespace iconrag::cli {
namespace {

enum class Kind { Text, Flag, Real, Count, List };

struct Setting {
    std::string_view key;
    std::string_view flag;  ///< empty: environment or config file only
    std::string_view env;
    Kind kind;
    bool network;
    std::string_view help;
};

// clang-format off
constexpr Setting kSettings[] = {
    {"taxonomy",        "--taxonomy",        "", Kind::Text,  false, "Iconclass dump (TSV or JSON lines) or a rendered taxonomy.jsonl"},
    {"prefix_filter",   "--prefix-filter",   "", Kind::Text,  false, "Comma-separated top-level prefixes to keep; empty keeps all"},
    {"lenient",         "--lenient",         "", Kind::Flag,  false, "Skip missing ancestors instead of failing"},
    {"database",        "--database",        "", Kind::Text,  false, "basic, hierarchical (index build also accepts both)"},
    {"method",          "--method",          "", Kind::Text,  false, "Query kind (image, keyword, vector, hybrid, rag-vector, rag-hybrid), a full label, or all"},
    {"mode",            "--mode",            "", Kind::Text,  false, "Description mode: page or illustration (describe also accepts both)"},
    {"alpha",           "--alpha",           "", Kind::Real,  false, "Hybrid weight of the vector side"},
    {"candidate_pool",  "--candidate-pool",  "", Kind::Count, false, "Hits taken from each side before hybrid fusion"},
    {"rag_k",           "--rag-k",           "", Kind::Count, false, "Candidates handed to the selector"},
    {"image_k",         "--image-k",         "", Kind::Count, false, "Neighbours consulted by the image vote"},
    {"k1",              "--k1",              "", Kind::Real,  false, "BM25 term-frequency saturation"},
    {"b",               "--b",               "", Kind::Real,  false, "BM25 length normalisation"},
    {"offline",         "--offline",         "ICONRAG_OFFLINE", Kind::Flag, false, "Use hermetic providers only"},
    {"index_dir",       "--index-dir",       "", Kind::Text,  false, "Index directory"},
    {"cache",           "--cache",           "", Kind::Text,  false, "Cache directory for descriptions and embeddings"},
    {"out",             "--out",             "", Kind::Text,  false, "Output path"},
    {"manifest",        "--manifest",        "", Kind::Text,  false, "Manifest (CSV or JSON lines)"},
    {"image_refs",      "--image-refs",      "", Kind::Text,  false, "Reference image vectors for the image vote (JSON lines)"},
    {"prompts",         "--prompts",         "", Kind::Text,  false, "Prompt template file (JSON)"},
    {"predictions",     "--predictions",     "", Kind::List,  false, "Predictions CSV files"},
    {"label",           "--label",           "", Kind::Text,  false, "Method label for a single predictions file"},
    {"max_level",       "--max-level",       "", Kind::Count, false, "Deepest level in the level-accuracy table"},
    {"max_k",           "--max-k",           "", Kind::Count, false, "Most levels truncated in the truncation sweep"},
    {"concurrency",     "--concurrency",     "", Kind::Count, false, "Worker threads for batch commands"},
    {"dim",             "--dim",             "", Kind::Count, false, "Offline embedding dimension"},
    {"api_base",        "--api-base",        "ICONRAG_API_BASE", Kind::Text, true, "OpenAI-compatible endpoint URL"},
    {"api_key",         "",                  "ICONRAG_API_KEY", Kind::Text, true, ""},
    {"chat_model",      "--chat-model",      "ICONRAG_CHAT_MODEL", Kind::Text, true, "Chat model for descriptions and RAG selection"},
    {"embedding_model", "--embedding-model", "ICONRAG_EMBEDDING_MODEL", Kind::Text, true, "Remote embedding model"},
    {"embedding_dim",   "--embedding-dim",   "", Kind::Count, true, "Requested remote embedding dimension (0: model default)"},
    {"timeout",         "--timeout",         "", Kind::Count, false, "Request timeout in seconds"},
    {"max_in_flight",   "--max-in-flight",   "", Kind::Count, false, "Concurrent requests per endpoint"},
};
// clang-format on

const Setting* find_setting(std::string_view key) {
    for (const auto& s : kSettings) {
        if (s.key == key) return &s;
    }
    return nullptr;
}

std::string as_text(const nlohmann::json& v, std::string_view key) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number() || v.is_boolean()) return v.dump();
    throw UsageError(std::string(key) + ": expected a string");
}

bool as_flag(const nlohmann::json& v, std::string_view key) {
    if (v.is_boolean()) return v.get<bool>();
    const std::string s = lowercase(as_text(v, key));
    if (s == "1" || s == "true" || s == "yes" || s == "on") return true;
    if (s == "0" || s == "false" || s == "no" || s == "off" || s.empty()) return false;
    throw UsageError(std::string(key) + ": expected a boolean, got '" + s + "'");
}

double as_real(const nlohmann::json& v, std::string_view key) {
    if (v.is_number()) return v.get<double>();
    const std::string s = as_text(v, key);
    double out = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    if (ec != std::errc{} || ptr != s.data() + s.size()) {
        throw UsageError(std::string(key) + ": expected a number, got '" + s + "'");
    }
    return out;
}

std::size_t as_count(const nlohmann::json& v, std::string_view key) {
    if (v.is_number_unsigned()) return v.get<std::size_t>();
    const std::string s = as_text(v, key);
    std::size_t out = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size()) {
        throw UsageError(std::string(key) + ": expected a non-negative integer, got '" + s + "'");
    }
    return out;
}

std::vector<std::string> as_list(const nlohmann::json& v, std::string_view key) {
    std::vector<std::string> out;
    if (v.is_array()) {
        for (const auto& item : v) out.push_back(as_text(item, key));
        return out;
    }
    const std::string s = as_text(v, key);
    std::size_t start = 0;
    while (start <= s.size()) {
        const std::size_t comma = std::min(s.find(',', start), s.size());
        const auto part = trim(std::string_view(s).substr(start, comma - start));
        if (!part.empty()) out.emplace_back(part);
        start = comma + 1;
    }
    return out;
}

nlohmann::json read_config_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw UsageError("cannot open config file " + path);
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw UsageError("config file " + path + ": " + e.what());
    }
    if (!j.is_object()) throw UsageError("config file " + path + " must hold a JSON object");
    for (const auto& [key, value] : j.items()) {
        if (find_setting(key) == nullptr) throw UsageError("config file " + path + ": unknown setting '" + key + "'");
    }
    return j;
}

}  // namespace

nlohmann::json to_json(const RunConfig& c) {
    return {{"taxonomy", c.taxonomy},
            {"prefix_filter", c.prefix_filter},
            {"lenient", c.lenient},
            {"database", c.database},
            {"method", c.method},
            {"mode", c.mode},
            {"alpha", c.alpha},
            {"candidate_pool", c.candidate_pool},
            {"rag_k", c.rag_k},
            {"image_k", c.image_k},
            {"k1", c.k1},
            {"b", c.b},
            {"offline", c.offline},
            {"index_dir", c.index_dir},
            {"cache", c.cache},
            {"out", c.out},
            {"manifest", c.manifest},
            {"image_refs", c.image_refs},
            {"prompts", c.prompts},
            {"concurrency", c.concurrency},
            {"dim", c.dim},
            {"api_base", c.offline ? "" : c.api_base},
            {"api_key_set", !c.api_key.empty()},
            {"chat_model", c.chat_model},
            {"embedding_model", c.embedding_model},
            {"embedding_dim", c.embedding_dim},
            {"timeout", c.timeout_seconds},
            {"max_in_flight", c.max_in_flight}};
}

ConfigLayers::ConfigLayers(CLI::App& app, const std::vector<std::string>& keys) : app_(app), keys_(keys) {
    app.add_option("--config", config_path_, "JSON config file; flags and environment take precedence");
    for (const auto& key : keys_) {
        const Setting* s = find_setting(key);
        if (s == nullptr) throw std::logic_error("unknown setting " + key);
        if (s->flag.empty()) continue;
        const std::string flag(s->flag);
        const std::string help(s->help);
        switch (s->kind) {
            case Kind::Flag:
                app.add_flag(flag, flags_[key], help);
                break;
            case Kind::List:
                app.add_option(flag, lists_[key], help)->expected(1, -1);
                break;
            default:
                app.add_option(flag, scalars_[key], help);
                break;
        }
    }
}

RunConfig ConfigLayers::resolve(const std::map<std::string, std::string>& env) const {
    nlohmann::json file = config_path_.empty() ? nlohmann::json::object() : read_config_file(config_path_);

    nlohmann::json flags = nlohmann::json::object();
    for (const auto& key : keys_) {
        const Setting* s = find_setting(key);
        if (s->flag.empty() || app_.count(std::string(s->flag)) == 0) continue;
        if (s->kind == Kind::Flag) {
            flags[key] = flags_.at(key);
        } else if (s->kind == Kind::List) {
            flags[key] = lists_.at(key);
        } else {
            flags[key] = scalars_.at(key);
        }
    }

    nlohmann::json envs = nlohmann::json::object();
    for (const auto& s : kSettings) {
        if (s.env.empty()) continue;
        if (const auto it = env.find(std::string(s.env)); it != env.end() && !it->second.empty()) {
            envs[std::string(s.key)] = it->second;
        }
    }

    const bool offline = flags.contains("offline")  ? as_flag(flags["offline"], "offline")
                         : envs.contains("offline") ? as_flag(envs["offline"], "offline")
                         : file.contains("offline") ? as_flag(file["offline"], "offline")
                                                    : false;
    if (offline) {
        for (const auto& s : kSettings) {
            if (!s.network) continue;
            const std::string key(s.key);
            if (flags.contains(key) || file.contains(key)) {
                throw UsageError("offline mode forbids network setting '" + key + "'");
            }
            envs.erase(key);  // ambient credentials are ignored, not an error
        }
    }

    nlohmann::json merged = file;
    merged.update(envs);
    merged.update(flags);

    RunConfig c;
    for (const auto& [key, value] : merged.items()) {
        if (key == "taxonomy") c.taxonomy = as_text(value, key);
        else if (key == "prefix_filter") c.prefix_filter = as_list(value, key);
        else if (key == "lenient") c.lenient = as_flag(value, key);
        else if (key == "database") c.database = as_text(value, key);
        else if (key == "method") c.method = as_text(value, key);
        else if (key == "mode") c.mode = as_text(value, key);
        else if (key == "alpha") c.alpha = as_real(value, key);
        else if (key == "candidate_pool") c.candidate_pool = as_count(value, key);
        else if (key == "rag_k") c.rag_k = as_count(value, key);
        else if (key == "image_k") c.image_k = as_count(value, key);
        else if (key == "k1") c.k1 = as_real(value, key);
        else if (key == "b") c.b = as_real(value, key);
        else if (key == "offline") c.offline = as_flag(value, key);
        else if (key == "index_dir") c.index_dir = as_text(value, key);
        else if (key == "cache") c.cache = as_text(value, key);
        else if (key == "out") c.out = as_text(value, key);
        else if (key == "manifest") c.manifest = as_text(value, key);
        else if (key == "image_refs") c.image_refs = as_text(value, key);
        else if (key == "prompts") c.prompts = as_text(value, key);
        else if (key == "predictions") c.predictions = as_list(value, key);
        else if (key == "label") c.label = as_text(value, key);
        else if (key == "max_level") c.max_level = as_count(value, key);
        else if (key == "max_k") c.max_k = as_count(value, key);
        else if (key == "concurrency") c.concurrency = as_count(value, key);
        else if (key == "dim") c.dim = as_count(value, key);
        else if (key == "api_base") c.api_base = as_text(value, key);
        else if (key == "api_key") c.api_key = as_text(value, key);
        else if (key == "chat_model") c.chat_model = as_text(value, key);
        else if (key == "embedding_model") c.embedding_model = as_text(value, key);
        else if (key == "embedding_dim") c.embedding_dim = as_count(value, key);
        else if (key == "timeout") c.timeout_seconds = as_count(value, key);
        else if (key == "max_in_flight") c.max_in_flight = as_count(value, key);
    }

    if (!(c.alpha >= 0.0 && c.alpha <= 1.0)) throw UsageError("--alpha must lie in [0, 1]");
    if (c.rag_k == 0) throw UsageError("--rag-k must be at least 1");
    if (c.image_k == 0) throw UsageError("--image-k must be at least 1");
    if (c.candidate_pool == 0) throw UsageError("--candidate-pool must be at least 1");
    if (c.concurrency == 0) throw UsageError("--concurrency must be at least 1");
    if (c.max_in_flight == 0) throw UsageError("--max-in-flight must be at least 1");
    if (c.dim < 16) throw UsageError("--dim must be at least 16");
    if (!(c.k1 >= 0.0)) throw UsageError("--k1 must be non-negative");
    if (!(c.b >= 0.0 && c.b <= 1.0)) throw UsageError("--b must lie in [0, 1]");
    return c;
}

std::map<std::string, std::string> read_environment() {
    std::map<std::string, std::string> env;
    for (const auto& s : kSettings) {
        if (s.env.empty()) continue;
        const std::string name(s.env);
        if (const char* v = std::getenv(name.c_str())) env[name] = v;
    }
    if (!env.contains("ICONRAG_API_KEY")) {
        if (const char* v = std::getenv("OPENAI_API_KEY")) env["ICONRAG_API_KEY"] = v;
    }
    return env;
}

}  // namespace iconrag::cli
