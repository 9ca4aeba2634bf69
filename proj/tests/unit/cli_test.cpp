#include <catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "cli.hpp"

namespace fs = std::filesystem;
using Catch::Matchers::ContainsSubstring;
using nlohmann::json;

namespace {

struct Outcome {
    int status;
    std::string out;
    std::string err;
};

Outcome invoke(const std::vector<std::string>& args, const std::map<std::string, std::string>& env = {}) {
    std::ostringstream out, err;
    const int status = iconrag::cli::run(args, out, err, env);
    return {status, out.str(), err.str()};
}

fs::path mini() { return fs::path(ICONRAG_FIXTURES) / "mini"; }

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

json read_json(const fs::path& p) { return json::parse(slurp(p)); }

/// Taxonomy and indices built once from the mini fixture.
const fs::path& workspace() {
    static const fs::path dir = [] {
        const auto d = fs::temp_directory_path() / "iconrag_cli_ws";
        fs::remove_all(d);
        fs::create_directories(d);
        REQUIRE(invoke({"taxonomy", "build", "--taxonomy", (mini() / "iconclass_mini.tsv").string(), "--out",
                         (d / "taxonomy.jsonl").string()})
                    .status == 0);
        REQUIRE(invoke({"index", "build", "--taxonomy", (d / "taxonomy.jsonl").string(), "--index-dir",
                         (d / "index").string(), "--offline"})
                    .status == 0);
        return d;
    }();
    return dir;
}

fs::path scratch(const std::string& name) {
    auto d = fs::temp_directory_path() / ("iconrag_cli_" + name);
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
}

std::vector<std::string> classify_args(const std::string& method, const fs::path& out) {
    const auto& ws = workspace();
    return {"classify",          "--method",   method,
            "--manifest",        (mini() / "manifest.csv").string(),
            "--taxonomy",        (ws / "taxonomy.jsonl").string(),
            "--index-dir",       (ws / "index").string(),
            "--image-refs",      (mini() / "image_refs.jsonl").string(),
            "--offline",         "--out",      out.string()};
}

}  // namespace

TEST_CASE("usage errors exit with status 2", "[cli]") {
    CHECK(invoke({}).status == 2);
    CHECK(invoke({"frobnicate"}).status == 2);
    CHECK(invoke({"classify", "--rag-k", "many"}).status == 2);
    const auto unknown = invoke(classify_args("bm25-page-basic", scratch("unknown") / "p"));
    CHECK(unknown.status == 2);
    CHECK_THAT(unknown.err, ContainsSubstring("bm25"));
    CHECK(invoke(classify_args("hybrid", scratch("alpha") / "p")).status == 0);
    auto bad_alpha = classify_args("hybrid", scratch("alpha") / "p");
    bad_alpha.insert(bad_alpha.end(), {"--alpha", "1.5"});
    CHECK(invoke(bad_alpha).status == 2);
    CHECK(invoke({"--version"}).status == 0);
    const auto help = invoke({"--help"});
    CHECK(help.status == 0);
    CHECK_THAT(help.out, ContainsSubstring("classify"));
}

TEST_CASE("classify records the effective configuration", "[cli]") {
    const auto dir = scratch("ragk");
    auto args = classify_args("rag-vector", dir / "run");
    args.insert(args.end(), {"--rag-k", "10"});
    const auto r = invoke(args);
    REQUIRE(r.status == 0);
    const auto meta = read_json(dir / "run.meta.json");
    CHECK(meta.at("config").at("rag_k") == 10);
    CHECK(meta.at("method").at("rag_k") == 10);
    CHECK(meta.at("label") == "rag-vector-page-basic");
    CHECK(meta.at("items") == 12);
    CHECK(meta.at("config").at("api_key_set") == false);
    CHECK_FALSE(meta.at("config").contains("api_key"));

    std::ifstream jsonl(dir / "run.jsonl");
    std::string line;
    std::size_t lines = 0;
    while (std::getline(jsonl, line)) {
        const auto rec = json::parse(line);
        CHECK(rec.at("candidates").size() == 10);
        ++lines;
    }
    CHECK(lines == 12);
}

TEST_CASE("configuration layers: flags over environment over file", "[cli][config]") {
    const auto dir = scratch("layers");
    std::ofstream(dir / "config.json") << R"({"rag_k": 7, "mode": "illustration", "concurrency": 2})";
    auto args = classify_args("rag-hybrid", dir / "a");
    args.insert(args.end(), {"--config", (dir / "config.json").string()});
    REQUIRE(invoke(args).status == 0);
    auto meta = read_json(dir / "a.meta.json");
    CHECK(meta.at("config").at("rag_k") == 7);
    CHECK(meta.at("label") == "rag-hybrid-illustration-hierarchical");

    args = classify_args("rag-hybrid", dir / "b");
    args.insert(args.end(), {"--config", (dir / "config.json").string(), "--rag-k", "3", "--mode", "page"});
    REQUIRE(invoke(args).status == 0);
    meta = read_json(dir / "b.meta.json");
    CHECK(meta.at("config").at("rag_k") == 3);
    CHECK(meta.at("config").at("concurrency") == 2);
    CHECK(meta.at("label") == "rag-hybrid-page-hierarchical");

    std::ofstream(dir / "broken.json") << "{rag_k: 7";
    args = classify_args("rag-hybrid", dir / "c");
    args.insert(args.end(), {"--config", (dir / "broken.json").string()});
    CHECK(invoke(args).status == 2);
}

TEST_CASE("offline mode rejects explicit network settings but ignores ambient ones", "[cli][config]") {
    const auto dir = scratch("offline");
    auto args = classify_args("keyword", dir / "a");
    args.insert(args.end(), {"--chat-model", "some-model"});
    const auto rejected = invoke(args);
    CHECK(rejected.status == 2);
    CHECK_THAT(rejected.err, ContainsSubstring("offline"));

    const auto ambient = invoke(classify_args("keyword", dir / "b"),
                                 {{"ICONRAG_CHAT_MODEL", "some-model"}, {"ICONRAG_API_KEY", "sk-secret"}});
    CHECK(ambient.status == 0);
    const auto meta = slurp(dir / "b.meta.json");
    CHECK_THAT(meta, !ContainsSubstring("sk-secret"));
    CHECK_THAT(meta, !ContainsSubstring("some-model"));

    std::ofstream(dir / "net.json") << R"({"api_base": "http://example.invalid/v1"})";
    args = classify_args("keyword", dir / "c");
    args.insert(args.end(), {"--config", (dir / "net.json").string()});
    CHECK(invoke(args).status == 2);

    // The environment can switch offline mode on.
    args = classify_args("keyword", dir / "d");
    args.erase(std::find(args.begin(), args.end(), "--offline"));
    CHECK(invoke(args, {{"ICONRAG_OFFLINE", "1"}}).status == 0);
}

TEST_CASE("describe imports supplied text and refuses to invent it offline", "[cli][describe]") {
    const auto dir = scratch("describe");
    const auto ok = invoke({"describe", "--manifest", (mini() / "manifest.csv").string(), "--mode", "both",
                             "--cache", (dir / "cache").string(), "--offline"});
    REQUIRE(ok.status == 0);
    std::ifstream in(dir / "cache" / "descriptions.jsonl");
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) ++n;
    CHECK(n == 24);

    std::ofstream(dir / "bare.csv") << "image_id,page_image_path\nx1,pages/x1.jpg\n";
    const auto refused = invoke({"describe", "--manifest", (dir / "bare.csv").string(), "--cache",
                                  (dir / "cache").string(), "--offline"});
    CHECK(refused.status == 1);
    CHECK_THAT(refused.err, ContainsSubstring("offline mode cannot generate descriptions"));
    CHECK_THAT(refused.err, ContainsSubstring("x1"));

    CHECK(invoke({"describe", "--manifest", (dir / "bare.csv").string(), "--offline"}).status == 2);
}

TEST_CASE("classify exits 3 when some items fail", "[cli]") {
    const auto dir = scratch("partial");
    std::ofstream(dir / "m.csv") << "image_id,ground_truth,page_description\n"
                                 << "a,71B32,Noah builds the ark and animals enter it\n"
                                 << "b,73D231,\n";
    const auto& ws = workspace();
    const auto r = invoke({"classify", "--method", "keyword", "--manifest", (dir / "m.csv").string(), "--taxonomy",
                            (ws / "taxonomy.jsonl").string(), "--index-dir", (ws / "index").string(), "--offline",
                            "--out", (dir / "run").string()});
    CHECK(r.status == 3);
    const auto csv = slurp(dir / "run.csv");
    CHECK(csv.rfind("image_id,predicted_code,ground_truth_code\na,", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 2);
    CHECK(read_json(dir / "run.meta.json").at("errors") == 1);
}

TEST_CASE("evaluate scores CSV predictions", "[cli][evaluate]") {
    const auto dir = scratch("evaluate");
    std::ofstream(dir / "six.csv") << "image_id,predicted_code,ground_truth_code\n"
                                   << "e,73D2311,73D231\nf,73D231,73D231\na,73D2,73D231\n"
                                   << "b,73D24,73D231\nc,73D232,73D231\nn,11A,73D231\n";
    const auto r = invoke({"evaluate", "--predictions", (dir / "six.csv").string(), "--out", (dir / "rep").string()});
    REQUIRE(r.status == 0);
    const auto report = read_json(dir / "rep" / "report.json");
    const auto& m = report.at("methods")[0];
    CHECK(m.at("label") == "six");
    for (const auto& [type, count] : m.at("match_types").items()) CHECK(count == 1);
    CHECK(m.at("match_types").size() == 6);
    CHECK(slurp(dir / "rep" / "report.txt") == r.out);

    std::ofstream(dir / "empty.csv") << "";
    CHECK(invoke({"evaluate", "--predictions", (dir / "empty.csv").string(), "--out", (dir / "e").string()}).status ==
          1);
    std::ofstream(dir / "header.csv") << "image_id,predicted_code,ground_truth_code\n";
    CHECK(invoke({"evaluate", "--predictions", (dir / "header.csv").string(), "--out", (dir / "h").string()})
              .status != 0);
    CHECK(invoke({"evaluate", "--out", (dir / "x").string()}).status == 2);
    CHECK(invoke({"evaluate", "--predictions", (dir / "absent.csv").string()}).status == 1);

    const auto labelled = invoke({"evaluate", "--predictions", (dir / "six.csv").string(), "--label", "mine",
                                   "--out", (dir / "l").string()});
    REQUIRE(labelled.status == 0);
    CHECK(read_json(dir / "l" / "report.json").at("methods")[0].at("label") == "mine");
}

TEST_CASE("rebuilding an index reproduces its metadata", "[cli][index]") {
    const auto dir = scratch("rebuild");
    const auto& ws = workspace();
    const auto build = [&](const fs::path& out) {
        return invoke({"index", "build", "--taxonomy", (ws / "taxonomy.jsonl").string(), "--index-dir", out.string(),
                        "--offline", "--database", "basic"});
    };
    REQUIRE(build(dir / "one").status == 0);
    REQUIRE(build(dir / "two").status == 0);
    auto a = read_json(dir / "one" / "basic" / "meta.json");
    auto b = read_json(dir / "two" / "basic" / "meta.json");
    a.erase("created_at");
    b.erase("created_at");
    a["config"].erase("index_dir");
    b["config"].erase("index_dir");
    CHECK(a == b);
    CHECK(slurp(dir / "one" / "basic" / "keyword.json") == slurp(dir / "two" / "basic" / "keyword.json"));
    CHECK(slurp(dir / "one" / "basic" / "vectors.jsonl") == slurp(dir / "two" / "basic" / "vectors.jsonl"));
    CHECK_FALSE(fs::exists(dir / "one" / "hierarchical"));
}

TEST_CASE("a missing index is reported", "[cli][index]") {
    const auto dir = scratch("noindex");
    auto args = classify_args("keyword", dir / "p");
    const auto it = std::find(args.begin(), args.end(), "--index-dir");
    *(it + 1) = (dir / "nowhere").string();
    const auto r = invoke(args);
    CHECK(r.status == 1);
    CHECK_THAT(r.err, ContainsSubstring("index"));
}
