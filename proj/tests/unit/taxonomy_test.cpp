#include <catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "iconrag/error.hpp"
#include "iconrag/taxonomy/documents.hpp"
#include "iconrag/taxonomy/taxonomy.hpp"
#include "oracles.hpp"

using namespace iconrag;
using Catch::Matchers::ContainsSubstring;

namespace {

std::vector<std::string> raws(const std::vector<IconclassCode>& codes) {
    std::vector<std::string> out;
    for (const auto& c : codes) out.push_back(c.raw());
    return out;
}

ErrorCode error_of(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("no iconrag::Error thrown");
    return ErrorCode::Io;
}

/// Random ladders with occasional name and key qualifiers mixed in.
std::string random_code(std::mt19937_64& rng) {
    std::uniform_int_distribution<std::size_t> depth(1, 9);
    std::string code = oracle::random_ladder(rng, depth(rng));
    std::uniform_int_distribution<int> pick(0, 9);
    const int extra = pick(rng);
    if (code.size() >= 3 && extra == 0) code += "(PAUL)";
    if (code.size() >= 3 && extra == 1) code += "(+" + std::string("1K3").substr(0, 1 + pick(rng) % 3) + ")";
    if (code.size() >= 3 && extra == 2) code += "(...)" + std::to_string(1 + pick(rng) % 9);
    return code;
}

Taxonomy mini_taxonomy() {
    return load_taxonomy_file(std::filesystem::path(ICONRAG_FIXTURES) / "mini" / "iconclass_mini.tsv").taxonomy;
}

}  // namespace

TEST_CASE("parse_code splits digits and letters into levels", "[code]") {
    const auto code = parse_code("73D231");
    CHECK(code.segments() == std::vector<std::string>{"7", "73", "73D", "73D2", "73D23", "73D231"});
    CHECK(code.raw() == "73D231");

    const auto ark = parse_code("71B32");
    CHECK(ark.levels() == 5);
    CHECK(ark.raw() == "71B32");
}

TEST_CASE("parse_code treats qualifiers as levels", "[code]") {
    CHECK(parse_code("11H(PAUL)4").segments() ==
          std::vector<std::string>{"1", "11", "11H", "11H(PAUL)", "11H(PAUL)4"});
    CHECK(parse_code("25F(+12)").segments() ==
          std::vector<std::string>{"2", "25", "25F", "25F(+1)", "25F(+12)"});
    CHECK(parse_code("71A(...)1").segments() ==
          std::vector<std::string>{"7", "71", "71A", "71A(...)", "71A(...)1"});
    CHECK(parse_code("  73D2\t").raw() == "73D2");
}

TEST_CASE("parse_code rejects malformed notation", "[code]") {
    for (const char* bad : {"73D(", "73D)", "", "   ", "D73", "73d", "11H(paul)", "11H()", "25F(+)", "25F(+a)",
                            "7 3", "11H(P(A)UL)"}) {
        INFO(bad);
        CHECK(error_of([&] { (void)parse_code(bad); }) == ErrorCode::MalformedCode);
    }
}

TEST_CASE("parent_chain lists every level root first", "[code]") {
    CHECK(raws(parent_chain(parse_code("73D231"))) ==
          std::vector<std::string>{"7", "73", "73D", "73D2", "73D23", "73D231"});
    CHECK(raws(parent_chain(parse_code("7"))) == std::vector<std::string>{"7"});
    const auto chain = raws(parent_chain(parse_code("71H1442")));
    REQUIRE(chain.size() == 7);
    CHECK(chain[5] == "71H144");
    CHECK(chain[6] == "71H1442");
}

TEST_CASE("common_depth counts shared leading levels", "[code]") {
    CHECK(common_depth(parse_code("71H1442"), parse_code("71H14")) == 5);
    CHECK(common_depth(parse_code("73D231"), parse_code("73D231")) == 6);
    CHECK(common_depth(parse_code("11A"), parse_code("73D231")) == 0);
    CHECK(common_depth(parse_code("11H(PAUL)4"), parse_code("11H(PETER)")) == 3);
    CHECK(common_depth(parse_code("25F(+12)"), parse_code("25F(+13)")) == 4);
}

TEST_CASE("truncate_code strips trailing levels down to the root", "[code]") {
    CHECK(truncate_code(parse_code("71H1442"), 2).raw() == "71H14");
    CHECK(truncate_code(parse_code("71H1442"), 0).raw() == "71H1442");
    CHECK(truncate_code(parse_code("7"), 3).raw() == "7");
    CHECK(truncate_code(parse_code("25F(+12)"), 1).raw() == "25F(+1)");
}

TEST_CASE("code properties hold on random notation", "[code][property]") {
    std::mt19937_64 rng(7);
    for (int i = 0; i < 2000; ++i) {
        const std::string raw = random_code(rng);
        INFO(raw);
        const auto code = parse_code(raw);
        CHECK(code.segments() == oracle::segments(raw));
        CHECK(code.raw() == raw);

        const auto chain = parent_chain(code);
        REQUIRE(chain.size() == code.levels());
        std::string rebuilt;
        for (std::size_t l = 0; l < chain.size(); ++l) {
            CHECK(parse_code(chain[l].raw()) == chain[l]);
            const std::string& seg = chain[l].raw();
            if (l == 0) {
                rebuilt = seg;
                continue;
            }
            const std::string& prev = chain[l - 1].raw();
            const bool key_step = seg.size() == prev.size() + 1 && prev.back() == ')' && seg.back() == ')' &&
                                  prev.find("(+") != std::string::npos;
            if (key_step) {
                // Key levels grow inside the bracket.
                CHECK(seg.substr(0, prev.size() - 1) == prev.substr(0, prev.size() - 1));
                rebuilt.insert(rebuilt.size() - 1, 1, seg[seg.size() - 2]);
            } else {
                REQUIRE(seg.size() > prev.size());
                CHECK(seg.compare(0, prev.size(), prev) == 0);
                rebuilt += seg.substr(prev.size());
            }
        }
        CHECK(rebuilt == raw);

        const std::size_t i1 = rng() % 5;
        const std::size_t j1 = rng() % 5;
        CHECK(truncate_code(truncate_code(code, i1), j1) == truncate_code(code, i1 + j1));
        CHECK(truncate_code(code, i1).raw() == oracle::truncate(raw, i1));
    }
}

TEST_CASE("common_depth properties on random pairs", "[code][property]") {
    std::mt19937_64 rng(11);
    for (int i = 0; i < 2000; ++i) {
        const auto [ra, rb] = oracle::random_pair(rng);
        INFO(ra << " vs " << rb);
        const auto a = parse_code(ra);
        const auto b = parse_code(rb);
        const auto d = common_depth(a, b);
        CHECK(d == common_depth(b, a));
        CHECK(d <= std::min(a.levels(), b.levels()));
        CHECK(d == oracle::compare(ra, rb).m);
        const auto& bs = b.segments();
        const bool a_in_b = std::find(bs.begin(), bs.end(), a.raw()) != bs.end();
        CHECK((d == a.levels()) == a_in_b);
    }
}

TEST_CASE("load_taxonomy filters by top-level category", "[taxonomy]") {
    std::istringstream in("71B32\tthe building of the ark\n25F\tanimals\n11H\tsaints\n");
    const auto loaded = load_taxonomy(in, {"1", "7"});
    CHECK(loaded.taxonomy.size() == 2);
    CHECK(loaded.taxonomy.contains("71B32"));
    CHECK(loaded.taxonomy.contains("11H"));
    CHECK_FALSE(loaded.taxonomy.contains("25F"));
    CHECK(loaded.stats.filtered == 1);
    CHECK(loaded.stats.entries == 2);
}

TEST_CASE("load_taxonomy accepts JSON lines and CRLF", "[taxonomy]") {
    std::istringstream jsonl(R"({"n":"7","txt":"Bible"})"
                             "\r\n"
                             R"({"code":"71","txt":"Old Testament"})"
                             "\r\n");
    const auto loaded = load_taxonomy(jsonl);
    CHECK(loaded.taxonomy.size() == 2);
    CHECK(loaded.taxonomy.at("71").text == "Old Testament");

    std::istringstream tsv("7\tBible\r\n\r\n73\tNew Testament  \r\n");
    const auto t = load_taxonomy(tsv);
    CHECK(t.taxonomy.at("73").text == "New Testament");
    CHECK(t.stats.blank == 1);
}

TEST_CASE("load_taxonomy reports the failing line", "[taxonomy]") {
    std::istringstream missing_tab("7\tBible\n71 Old Testament\n");
    try {
        (void)load_taxonomy(missing_tab);
        FAIL("expected MalformedLine");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::MalformedLine);
        CHECK_THAT(e.what(), ContainsSubstring("line 2"));
    }

    std::istringstream bad_code("7\tBible\n\n7x\tnope\n");
    try {
        (void)load_taxonomy(bad_code);
        FAIL("expected MalformedLine");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::MalformedLine);
        CHECK_THAT(e.what(), ContainsSubstring("line 3"));
    }

    std::istringstream dup("7\tBible\n7\tBible again\n");
    CHECK(error_of([&] { (void)load_taxonomy(dup); }) == ErrorCode::DuplicateCode);
}

TEST_CASE("an empty taxonomy file loads with a warning", "[taxonomy]") {
    std::istringstream empty("");
    const auto loaded = load_taxonomy(empty);
    CHECK(loaded.taxonomy.empty());
    CHECK_FALSE(loaded.stats.warnings.empty());
}

TEST_CASE("taxonomy rejects entries outside the filter or with blank text", "[taxonomy]") {
    Taxonomy t({"7"});
    CHECK(error_of([&] { t.add({parse_code("11H"), "saints"}); }) == ErrorCode::InvalidArgument);
    CHECK(error_of([&] { t.add({parse_code("7"), "   "}); }) == ErrorCode::InvalidArgument);
    t.add({parse_code("7"), "Bible"});
    CHECK(error_of([&] { t.add({parse_code("7"), "Bible"}); }) == ErrorCode::DuplicateCode);
    CHECK(error_of([&] { (void)t.at("73"); }) != ErrorCode::Io);
}

TEST_CASE("documents render the fixture's ark entry", "[documents]") {
    const auto taxonomy = mini_taxonomy();
    CHECK(taxonomy.size() == 50);
    const auto& ark = taxonomy.at("71B32");
    CHECK(render_basic_doc(ark) == "the building of the ark, and the embarkation (Genesis 7:5-9)");
    CHECK(render_hierarchical_doc(ark, taxonomy) ==
          "Bible; Old Testament; Genesis from the descendants of Cain and Seth to Abraham; story of Noah; "
          "the building of the ark, and the embarkation (Genesis 7:5-9)");
    const auto& root = taxonomy.at("7");
    CHECK(render_basic_doc(root) == "Bible");
    CHECK(render_hierarchical_doc(root, taxonomy) == "Bible");
    CHECK(render_hierarchical_doc(taxonomy.at("71"), taxonomy) == "Bible; Old Testament");
}

TEST_CASE("hierarchical rendering requires ancestors unless lenient", "[documents]") {
    Taxonomy t;
    t.add({parse_code("7"), "Bible"});
    t.add({parse_code("73D23"), "washing feet"});
    const auto& leaf = t.at("73D23");
    try {
        (void)render_hierarchical_doc(leaf, t);
        FAIL("expected MissingAncestor");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::MissingAncestor);
        CHECK_THAT(e.what(), ContainsSubstring("73D2"));
        CHECK_THAT(e.what(), ContainsSubstring("73D"));
    }
    std::vector<std::string> missing;
    CHECK(render_hierarchical_doc_lenient(leaf, t, &missing) == "Bible; washing feet");
    CHECK(missing == std::vector<std::string>{"73", "73D", "73D2"});
    CHECK(error_of([&] { (void)TaxonomyDocuments::render(t); }) == ErrorCode::MissingAncestor);
    std::vector<std::string> warnings;
    CHECK(TaxonomyDocuments::render(t, true, &warnings).size() == 2);
    CHECK_FALSE(warnings.empty());
}

TEST_CASE("hierarchical documents end with the basic document", "[documents][property]") {
    const auto taxonomy = mini_taxonomy();
    const auto docs = TaxonomyDocuments::render(taxonomy);
    REQUIRE(docs.size() == taxonomy.size());
    for (const auto& e : docs.entries()) {
        INFO(e.code.raw());
        REQUIRE(e.hierarchical.size() >= e.basic.size());
        CHECK(e.hierarchical.compare(e.hierarchical.size() - e.basic.size(), e.basic.size(), e.basic) == 0);
        std::string joined;
        for (const auto& level : parent_chain(e.code)) {
            if (!joined.empty()) joined += "; ";
            joined += docs.find(level.raw())->basic;
        }
        CHECK(e.hierarchical == joined);
    }
}

TEST_CASE("taxonomy documents survive a save and load", "[documents]") {
    const auto docs = TaxonomyDocuments::render(mini_taxonomy());
    const auto path = std::filesystem::temp_directory_path() / "iconrag_docs_roundtrip.jsonl";
    docs.save(path);
    const auto back = TaxonomyDocuments::load(path);
    REQUIRE(back.size() == docs.size());
    for (std::size_t i = 0; i < docs.size(); ++i) {
        CHECK(back.entries()[i].code == docs.entries()[i].code);
        CHECK(back.entries()[i].basic == docs.entries()[i].basic);
        CHECK(back.entries()[i].hierarchical == docs.entries()[i].hierarchical);
    }
    CHECK(back.documents(DatabaseKind::Basic).size() == docs.size());
    CHECK(back.find("71B32") != nullptr);
    CHECK(back.find("25F") == nullptr);
    std::filesystem::remove(path);
}
