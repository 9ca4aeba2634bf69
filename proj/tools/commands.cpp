#include <algorithm>
#include <atomic>
#include <fstream>
#include <iostream>
#include <memory>
#include <mutex>
#include <thread>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>
#include <spdlog/sinks/ostream_sink.h>
#include <spdlog/spdlog.h>

#include "cli.hpp"
#include "config.hpp"
#include "iconrag/evaluation/report.hpp"
#include "iconrag/pipeline/classifier.hpp"
#include "iconrag/pipeline/predictions_io.hpp"
#include "iconrag/util/clock.hpp"
#include "iconrag/util/text.hpp"

namespace iconrag::cli {
namespace {

namespace fs = std::filesystem;

struct Session {
    RunConfig config;
    std::ostream& out;
    std::shared_ptr<spdlog::logger> log;
};

RemoteEndpoint endpoint_for(const RunConfig& c, std::string model) {
    RemoteEndpoint e;
    e.base_url = c.api_base;
    e.api_key = c.api_key;
    e.model = std::move(model);
    e.timeout = std::chrono::seconds(c.timeout_seconds);
    e.max_in_flight = c.max_in_flight;
    return e;
}

void require(const std::string& value, std::string_view flag) {
    if (value.empty()) throw UsageError(std::string(flag) + " is required");
}

void ensure_parent(const fs::path& file) {
    if (file.has_parent_path()) fs::create_directories(file.parent_path());
}

void write_file(const fs::path& path, std::string_view data) {
    ensure_parent(path);
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw Error(ErrorCode::Io, "cannot write " + path.string());
    f << data;
    if (!f) throw Error(ErrorCode::Io, "failed writing " + path.string());
}

std::vector<DatabaseKind> database_kinds(const std::string& text, bool allow_both) {
    if (text.empty() || text == "both") {
        if (!allow_both) throw UsageError("--database must be basic or hierarchical");
        return {DatabaseKind::Basic, DatabaseKind::Hierarchical};
    }
    const auto kind = parse_database_kind(text);
    if (!kind) throw UsageError("unknown --database '" + text + "' (basic, hierarchical)");
    return {*kind};
}

DescriptionMode description_mode(const std::string& text) {
    const auto mode = parse_description_mode(text);
    if (!mode) throw UsageError("unknown --mode '" + text + "' (page, illustration)");
    return *mode;
}

/// Accepts either a rendered taxonomy.jsonl or a raw dump.
TaxonomyDocuments load_documents(const Session& s) {
    require(s.config.taxonomy, "--taxonomy");
    const fs::path path = s.config.taxonomy;
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::Io, "cannot open taxonomy " + path.string());
    std::string line;
    while (std::getline(in, line) && trim(line).empty()) {
    }
    const auto first = nlohmann::json::parse(line, nullptr, false);
    if (first.is_object() && first.contains("basic") && first.contains("hierarchical")) {
        return TaxonomyDocuments::load(path);
    }
    auto loaded = load_taxonomy_file(path, s.config.prefix_filter);
    for (const auto& w : loaded.stats.warnings) s.log->warn("{}", w);
    std::vector<std::string> warnings;
    auto docs = TaxonomyDocuments::render(loaded.taxonomy, s.config.lenient, &warnings);
    for (const auto& w : warnings) s.log->warn("{}", w);
    return docs;
}

std::shared_ptr<EmbeddingCache> embedding_cache(const RunConfig& c) {
    if (c.cache.empty()) return nullptr;
    fs::create_directories(c.cache);
    return std::make_shared<EmbeddingCache>(fs::path(c.cache) / "embeddings.jsonl");
}

std::shared_ptr<EmbeddingProvider> with_cache(std::shared_ptr<EmbeddingProvider> inner, const RunConfig& c) {
    if (auto cache = embedding_cache(c)) return std::make_shared<CachedEmbeddingProvider>(std::move(inner), cache);
    return inner;
}

/// The embedder used to build new indices.
std::shared_ptr<EmbeddingProvider> index_embedder(const RunConfig& c) {
    if (c.offline) return std::make_shared<OfflineHashEmbedder>(c.dim);
    if (c.embedding_model.empty()) {
        throw UsageError("index build needs --embedding-model (or ICONRAG_EMBEDDING_MODEL), or --offline");
    }
    return with_cache(
        std::make_shared<RemoteEmbeddingProvider>(endpoint_for(c, c.embedding_model), c.embedding_dim), c);
}

/// The embedder matching an existing index, as recorded in its metadata.
std::shared_ptr<EmbeddingProvider> query_embedder(const SearchIndex& index, const RunConfig& c) {
    const auto& e = index.meta.embedder;
    const std::string kind = e.is_object() ? e.value("kind", std::string{}) : "";
    if (kind == "offline-hash") return std::make_shared<OfflineHashEmbedder>(e.value("dim", std::size_t{0}));
    if (kind == "remote") {
        if (c.offline) throw UsageError("the index was embedded remotely; rebuild it with --offline to run offline");
        const std::string model = c.embedding_model.empty() ? e.value("model", std::string{}) : c.embedding_model;
        return with_cache(std::make_shared<RemoteEmbeddingProvider>(endpoint_for(c, model), e.value("dim", 0)), c);
    }
    throw Error(ErrorCode::MissingIndex, "index has no vectors; rebuild it with an embedder");
}

// --- taxonomy build --------------------------------------------------------

int cmd_taxonomy_build(Session& s) {
    const auto& c = s.config;
    require(c.taxonomy, "--taxonomy");
    auto loaded = load_taxonomy_file(c.taxonomy, c.prefix_filter);
    for (const auto& w : loaded.stats.warnings) s.log->warn("{}", w);
    std::vector<std::string> warnings;
    const auto docs = TaxonomyDocuments::render(loaded.taxonomy, c.lenient, &warnings);
    for (const auto& w : warnings) s.log->warn("{}", w);

    fs::path out = c.out.empty() ? fs::path("taxonomy.jsonl") : fs::path(c.out);
    if (fs::is_directory(out) || c.out.ends_with('/')) out /= "taxonomy.jsonl";
    ensure_parent(out);
    docs.save(out);
    s.log->info("read {} lines, filtered {}, blank {}", loaded.stats.lines, loaded.stats.filtered,
                loaded.stats.blank);
    fmt::print(s.out, "{} entries written to {}\n", docs.size(), out.string());
    return kExitOk;
}

// --- index build -------------------------------------------------------------

int cmd_index_build(Session& s) {
    const auto& c = s.config;
    const auto kinds = database_kinds(c.database, true);
    const auto docs = load_documents(s);
    const auto embedder = index_embedder(c);
    nlohmann::json config{{"taxonomy", c.taxonomy},
                          {"prefix_filter", c.prefix_filter},
                          {"k1", c.k1},
                          {"b", c.b},
                          {"entries", docs.size()}};
    for (const auto kind : kinds) {
        const auto index = build_search_index(docs, kind, {c.k1, c.b}, embedder.get(), config);
        const fs::path dir = fs::path(c.index_dir) / std::string(to_string(kind));
        save_index(dir, index);
        fmt::print(s.out, "{} index: {} documents, {} terms, {} vectors -> {}\n", to_string(kind),
                   index.keyword.doc_count(), index.keyword.postings().size(),
                   index.vectors ? index.vectors->size() : 0, dir.string());
    }
    return kExitOk;
}

// --- describe ----------------------------------------------------------------

int cmd_describe(Session& s) {
    const auto& c = s.config;
    require(c.manifest, "--manifest");
    require(c.cache, "--cache");
    std::vector<DescriptionMode> modes;
    if (c.mode == "both") {
        modes = {DescriptionMode::FullPage, DescriptionMode::Illustration};
    } else {
        modes = {description_mode(c.mode)};
    }
    const auto manifest = load_manifest(c.manifest);
    fs::create_directories(c.cache);
    DescriptionCache cache(fs::path(c.cache) / "descriptions.jsonl");
    const auto prompts = c.prompts.empty() ? default_prompts() : load_prompts(c.prompts);

    std::size_t cached = 0;
    std::size_t supplied = 0;
    std::vector<std::pair<const ManifestItem*, DescriptionMode>> pending;
    for (const auto& item : manifest) {
        for (const auto mode : modes) {
            if (cache.find(item.image_id, mode)) {
                ++cached;
            } else if (const auto& text = item.supplied_description(mode); !trim(text).empty()) {
                cache.put({item.image_id, mode, std::string(trim(text)), "manifest", utc_timestamp(), "supplied"});
                ++supplied;
            } else {
                pending.emplace_back(&item, mode);
            }
        }
    }

    if (!pending.empty() && c.offline) {
        s.log->error("offline mode cannot generate descriptions: {} item(s) have no cached or pre-supplied text "
                     "(first: {}). Add a description column to the manifest, or run without --offline against a "
                     "vision-capable chat model (--chat-model).",
                     pending.size(), pending.front().first->image_id);
        return kExitFailure;
    }
    if (!pending.empty() && c.chat_model.empty()) {
        throw UsageError("describe needs --chat-model (or ICONRAG_CHAT_MODEL) to generate descriptions");
    }

    std::atomic<std::size_t> generated{0};
    std::atomic<std::size_t> failed{0};
    if (!pending.empty()) {
        RemoteChatProvider chat(endpoint_for(c, c.chat_model));
        std::atomic<std::size_t> next{0};
        const auto work = [&] {
            for (std::size_t i = next++; i < pending.size(); i = next++) {
                const auto& [item, mode] = pending[i];
                try {
                    const auto& path = item->image_path(mode);
                    if (path.empty()) throw Error(ErrorCode::MissingDescription, "no image path for this mode");
                    DescriptionRequest request{item->image_id, read_binary_file(path), mode,
                                               mime_type_for(path.string())};
                    describe_image(request, &chat, cache, prompts);
                    ++generated;
                } catch (const std::exception& e) {
                    ++failed;
                    s.log->error("{} ({}): {}", item->image_id, to_string(mode), e.what());
                }
            }
        };
        const std::size_t workers = std::min(c.concurrency, pending.size());
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
    }

    fmt::print(s.out, "descriptions: {} cached, {} supplied, {} generated, {} failed\n", cached, supplied,
               generated.load(), failed.load());
    return failed > 0 ? kExitPartial : kExitOk;
}

// --- classify ----------------------------------------------------------------

MethodSpec resolve_method(const RunConfig& c, const std::string& text) {
    MethodSpec method;
    if (const auto kind = parse_query_kind(text)) {
        const DescriptionMode mode = description_mode(c.mode);
        method = default_method(*kind, mode);
        if (!c.database.empty()) method.database_kind = database_kinds(c.database, false).front();
    } else if (const auto parsed = parse_method_label(text)) {
        method = *parsed;
        if (method.query_kind != QueryKind::ImageVote) {
            if (!c.database.empty() && database_kinds(c.database, false).front() != method.database_kind) {
                throw UsageError("--database contradicts method label " + text);
            }
        }
    } else {
        throw UsageError("unknown method '" + text +
                         "' (image, keyword, vector, hybrid, rag-vector, rag-hybrid, a label such as "
                         "rag-vector-page-basic, or all)");
    }
    method.alpha = c.alpha;
    method.candidate_pool = c.candidate_pool;
    method.rag_k = c.rag_k;
    method.image_k = c.image_k;
    validate(method);
    return method;
}

struct ClassifyResources {
    TaxonomyDocuments docs;
    std::map<DatabaseKind, SearchIndex> indices;
    std::shared_ptr<EmbeddingProvider> embedder;
    std::optional<ImageReferenceSet> image_refs;
    std::unique_ptr<ChatProvider> chat;
    std::unique_ptr<DescriptionCache> descriptions;
    PromptTemplates prompts;
};

void prepare(Session& s, ClassifyResources& r, const std::vector<MethodSpec>& methods) {
    const auto& c = s.config;
    for (const auto& m : methods) {
        if (m.query_kind == QueryKind::ImageVote) {
            if (!r.image_refs) r.image_refs.emplace(load_image_references(c.image_refs, &r.docs));
            continue;
        }
        if (!r.indices.contains(m.database_kind)) {
            r.indices.emplace(m.database_kind,
                              load_index(fs::path(c.index_dir) / std::string(to_string(m.database_kind))));
        }
        if (needs_vectors(m.query_kind) && !r.embedder) {
            r.embedder = query_embedder(r.indices.at(m.database_kind), c);
        }
        if (is_rag(m.query_kind) && !c.offline && c.chat_model.empty()) {
            throw UsageError("RAG methods need --chat-model (or ICONRAG_CHAT_MODEL), or --offline for the "
                             "hermetic selector");
        }
    }
    if (!c.offline && !c.chat_model.empty()) {
        r.chat = std::make_unique<RemoteChatProvider>(endpoint_for(c, c.chat_model));
    }
    if (!c.cache.empty()) {
        fs::create_directories(c.cache);
        r.descriptions = std::make_unique<DescriptionCache>(fs::path(c.cache) / "descriptions.jsonl");
    } else if (r.chat) {
        r.descriptions = std::make_unique<DescriptionCache>();
    }
}

ClassifierContext context_for(const ClassifyResources& r) {
    ClassifierContext ctx;
    ctx.taxonomy = &r.docs;
    if (const auto it = r.indices.find(DatabaseKind::Basic); it != r.indices.end()) ctx.basic = &it->second;
    if (const auto it = r.indices.find(DatabaseKind::Hierarchical); it != r.indices.end()) {
        ctx.hierarchical = &it->second;
    }
    ctx.image_refs = r.image_refs ? &*r.image_refs : nullptr;
    ctx.embedder = r.embedder.get();
    ctx.chat = r.chat.get();
    ctx.descriptions = r.descriptions.get();
    ctx.prompts = &r.prompts;
    return ctx;
}

std::size_t run_method(Session& s, const MethodSpec& method, const std::vector<ManifestItem>& manifest,
                       const ClassifierContext& ctx, const fs::path& out) {
    const auto results = classify_batch(manifest, method, ctx, s.config.concurrency);
    const auto paths = prediction_paths(out);
    ensure_parent(paths.jsonl);

    std::ostringstream jsonl;
    std::ostringstream csv;
    write_predictions_jsonl(jsonl, results, method);
    write_predictions_csv(csv, results);
    write_file(paths.jsonl, jsonl.str());
    write_file(paths.csv, csv.str());

    std::size_t errors = 0;
    std::size_t fallbacks = 0;
    for (const auto& r : results) {
        if (r.error) {
            ++errors;
            s.log->error("{}: {}: {}", r.image_id, to_string(r.error->code), r.error->message);
        } else if (r.prediction->fallback) {
            ++fallbacks;
        }
    }
    nlohmann::json meta{{"method", to_json(method)},
                        {"label", method.label()},
                        {"items", results.size()},
                        {"predicted", results.size() - errors},
                        {"errors", errors},
                        {"fallbacks", fallbacks},
                        {"embedder", ctx.embedder ? ctx.embedder->describe() : nlohmann::json()},
                        {"prompt_version", ctx.prompts->version},
                        {"created_at", utc_timestamp()},
                        {"config", to_json(s.config)}};
    write_file(paths.meta, meta.dump(2) + "\n");
    fmt::print(s.out, "{}: {} predicted, {} failed -> {}\n", method.label(), results.size() - errors, errors,
               paths.jsonl.string());
    return errors;
}

int cmd_classify(Session& s) {
    const auto& c = s.config;
    require(c.method, "--method");
    require(c.manifest, "--manifest");
    require(c.out, "--out");

    std::vector<MethodSpec> methods;
    const bool all = c.method == "all";
    if (all) {
        for (auto m : reference_methods()) {
            if (m.query_kind == QueryKind::ImageVote && c.image_refs.empty()) {
                s.log->warn("skipping {}: no --image-refs given", m.label());
                continue;
            }
            m.alpha = c.alpha;
            m.candidate_pool = c.candidate_pool;
            m.rag_k = c.rag_k;
            m.image_k = c.image_k;
            methods.push_back(m);
        }
    } else {
        methods.push_back(resolve_method(c, c.method));
        if (methods.front().query_kind == QueryKind::ImageVote) require(c.image_refs, "--image-refs");
    }

    const auto manifest = load_manifest(c.manifest);
    ClassifyResources resources{load_documents(s), {}, nullptr, std::nullopt, nullptr, nullptr,
                                c.prompts.empty() ? default_prompts() : load_prompts(c.prompts)};
    prepare(s, resources, methods);
    const auto ctx = context_for(resources);

    std::size_t errors = 0;
    for (const auto& method : methods) {
        const fs::path out = all ? fs::path(c.out) / method.label() : fs::path(c.out);
        errors += run_method(s, method, manifest, ctx, out);
    }
    return errors > 0 ? kExitPartial : kExitOk;
}

// --- evaluate ----------------------------------------------------------------

std::string label_for(const fs::path& csv) {
    const auto meta_path = prediction_paths(csv).meta;
    std::ifstream in(meta_path, std::ios::binary);
    if (in) {
        const auto meta = nlohmann::json::parse(in, nullptr, false);
        if (meta.is_object() && meta.contains("label") && meta["label"].is_string()) return meta["label"];
    }
    return csv.stem().string();
}

int cmd_evaluate(Session& s) {
    const auto& c = s.config;
    if (c.predictions.empty()) throw UsageError("--predictions is required");
    if (!c.label.empty() && c.predictions.size() != 1) throw UsageError("--label needs exactly one predictions file");

    CorpusReport report;
    report.max_level = c.max_level;
    report.max_k = c.max_k;
    for (const auto& file : c.predictions) {
        const auto pairs = read_prediction_csv_file(file);
        report.methods.push_back(
            evaluate_method(c.label.empty() ? label_for(file) : c.label, pairs, c.max_level, c.max_k));
    }

    // Known method labels follow the standard report order; anything else keeps its input position after them.
    const auto reference = reference_methods();
    const auto order = [&](const MethodReport& m) {
        const auto it = std::find_if(reference.begin(), reference.end(),
                                     [&](const MethodSpec& spec) { return spec.label() == m.label; });
        return static_cast<std::size_t>(it - reference.begin());
    };
    std::stable_sort(report.methods.begin(), report.methods.end(),
                     [&](const MethodReport& a, const MethodReport& b) { return order(a) < order(b); });

    const fs::path dir = c.out.empty() ? fs::path(".") : fs::path(c.out);
    fs::create_directories(dir);
    const std::string text = render_text(report);
    write_file(dir / "report.json", to_json(report).dump(2) + "\n");
    write_file(dir / "report.txt", text);
    s.out << text;
    return kExitOk;
}

// --- dispatch ------------------------------------------------------------------

std::shared_ptr<spdlog::logger> make_logger(std::ostream& err, const std::string& level) {
    auto sink = std::make_shared<spdlog::sinks::ostream_sink_mt>(err, true);
    auto log = std::make_shared<spdlog::logger>("iconrag", std::move(sink));
    log->set_pattern("[%l] %v");
    log->set_level(spdlog::level::from_str(level));
    return log;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
        const std::map<std::string, std::string>& env) {
    CLI::App app{"Iconclass classification with keyword, vector, hybrid and RAG search", "iconrag"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "iconrag 0.1.0");
    std::string log_level = "info";
    app.add_option("--log-level", log_level, "trace, debug, info, warn, error or off")
        ->check(CLI::IsMember({"trace", "debug", "info", "warn", "error", "off"}));

    using Handler = int (*)(Session&);
    std::vector<std::tuple<CLI::App*, std::unique_ptr<ConfigLayers>, Handler>> commands;
    const auto add = [&](CLI::App* sub, const std::vector<std::string>& keys, Handler handler) {
        commands.emplace_back(sub, std::make_unique<ConfigLayers>(*sub, keys), handler);
    };

    auto* taxonomy = app.add_subcommand("taxonomy", "Taxonomy ingestion");
    taxonomy->require_subcommand(1);
    add(taxonomy->add_subcommand("build", "Render basic and hierarchical documents to taxonomy.jsonl"),
        {"taxonomy", "prefix_filter", "lenient", "out"}, cmd_taxonomy_build);

    auto* index = app.add_subcommand("index", "Search indices");
    index->require_subcommand(1);
    add(index->add_subcommand("build", "Build keyword and vector indices"),
        {"taxonomy", "prefix_filter", "lenient", "database", "index_dir", "offline", "dim", "k1", "b", "cache",
         "api_base", "api_key", "embedding_model", "embedding_dim", "timeout", "max_in_flight"},
        cmd_index_build);

    add(app.add_subcommand("describe", "Generate or import image descriptions into the cache"),
        {"manifest", "mode", "cache", "offline", "prompts", "concurrency", "api_base", "api_key", "chat_model",
         "timeout", "max_in_flight"},
        cmd_describe);

    add(app.add_subcommand("classify", "Classify every manifest item with one method"),
        {"manifest", "method", "mode", "database", "taxonomy", "prefix_filter", "lenient", "index_dir",
         "image_refs", "alpha", "candidate_pool", "rag_k", "image_k", "offline", "cache", "prompts", "out",
         "concurrency", "api_base", "api_key", "chat_model", "embedding_model", "timeout", "max_in_flight"},
        cmd_classify);

    add(app.add_subcommand("evaluate", "Score predictions against ground truth"),
        {"predictions", "label", "out", "max_level", "max_k"}, cmd_evaluate);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    auto log = make_logger(err, log_level);
    for (auto& [sub, layers, handler] : commands) {
        if (!sub->parsed()) continue;
        try {
            Session session{layers->resolve(env), out, log};
            return handler(session);
        } catch (const UsageError& e) {
            log->error("{}", e.what());
            err << "Run with --help for more information.\n";
            return kExitUsage;
        } catch (const Error& e) {
            log->error("{}: {}", to_string(e.code()), e.what());
            return kExitFailure;
        } catch (const std::exception& e) {
            log->error("{}", e.what());
            return kExitFailure;
        }
    }
    return kExitUsage;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    return run(args, out, err, read_environment());
}

}  // namespace iconrag::cli
