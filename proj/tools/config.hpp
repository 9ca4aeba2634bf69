#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace CLI {
class App;
}

namespace iconrag::cli {

/// Thrown for bad flags or configuration values; maps to exit status 2.
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Settings shared by all subcommands after layering.
struct RunConfig {
    std::string taxonomy;
    std::vector<std::string> prefix_filter{"1", "7"};
    bool lenient = false;
    std::string database;
    std::string method;
    std::string mode = "page";
    double alpha = 0.75;
    std::size_t candidate_pool = 100;
    std::size_t rag_k = 5;
    std::size_t image_k = 10;
    double k1 = 1.2;
    double b = 0.75;
    bool offline = false;
    std::string index_dir = "index";
    std::string cache;
    std::string out;
    std::string manifest;
    std::string image_refs;
    std::string prompts;
    std::vector<std::string> predictions;
    std::string label;
    std::size_t max_level = 9;
    std::size_t max_k = 4;
    std::size_t concurrency = 4;
    std::size_t dim = 256;

    std::string api_base = "https://api.openai.com/v1";
    std::string api_key;
    std::string chat_model;
    std::string embedding_model;
    std::size_t embedding_dim = 0;
    std::size_t timeout_seconds = 60;
    std::size_t max_in_flight = 4;
};

/// The effective configuration as echoed into output metadata. The API
/// key is reduced to whether one is set.
nlohmann::json to_json(const RunConfig& config);

/// Registers the named settings as flags on `app` and, after parsing,
/// layers flags over environment over the `--config` JSON file.
class ConfigLayers {
public:
    ConfigLayers(CLI::App& app, const std::vector<std::string>& keys);

    /// Builds the RunConfig. `env` looks up environment variables.
    RunConfig resolve(const std::map<std::string, std::string>& env) const;

private:
    CLI::App& app_;
    std::vector<std::string> keys_;
    std::map<std::string, std::string> scalars_;
    std::map<std::string, std::vector<std::string>> lists_;
    std::map<std::string, bool> flags_;
    std::string config_path_;
};

/// Current process environment restricted to the variables iconrag reads.
std::map<std::string, std::string> read_environment();

}  // namespace iconrag::cli
