#include <catch_amalgamated.hpp>

#include <cmath>
#include <numeric>
#include <random>

#include "corpus.hpp"
#include "iconrag/error.hpp"
#include "iconrag/providers/embedding.hpp"
#include "iconrag/retrieval/hybrid.hpp"
#include "iconrag/retrieval/image_vote.hpp"
#include "iconrag/retrieval/keyword_index.hpp"
#include "iconrag/retrieval/tokenize.hpp"
#include "iconrag/retrieval/vector_index.hpp"
#include "oracles.hpp"

using namespace iconrag;
using Catch::Approx;

namespace {

Document doc(const char* id, const char* text) { return {parse_code(id), text}; }

std::vector<std::string> codes_of(const RankedList& hits) {
    std::vector<std::string> out;
    for (const auto& h : hits) out.push_back(h.code.raw());
    return out;
}

void check_ranked_list(const RankedList& hits) {
    for (std::size_t i = 0; i < hits.size(); ++i) {
        CHECK(hits[i].rank == i + 1);
        if (i > 0) CHECK(hits[i].score <= hits[i - 1].score);
    }
}

oracle::Bm25Corpus oracle_corpus(const std::vector<Document>& docs, Bm25Params params = {}) {
    oracle::Bm25Corpus corpus{{}, params.k1, params.b};
    for (const auto& d : docs) corpus.docs.push_back(tokenize(d.text));
    return corpus;
}

}  // namespace

TEST_CASE("tokenize lowercases and splits on non-word characters", "[tokenize]") {
    CHECK(tokenize("Noah's Ark!") == std::vector<std::string>{"noah", "s", "ark"});
    CHECK(tokenize("").empty());
    CHECK(tokenize("71B32 ark") == std::vector<std::string>{"71b32", "ark"});
    CHECK(tokenize("Élie, ÇA—va") == std::vector<std::string>{"élie", "ça", "va"});
    CHECK(unique_terms("ark Ark noah ark") == std::vector<std::string>{"ark", "noah"});
}

TEST_CASE("keyword index records lengths and rejects bad corpora", "[bm25]") {
    const std::vector<Document> docs{doc("71", "ark ark"), doc("72", "noah")};
    const auto index = KeywordIndex::build(docs);
    CHECK(index.doc_lengths() == std::vector<std::uint32_t>{2, 1});
    CHECK(index.avg_doc_length() == 1.5);
    CHECK(index.doc_count() == 2);
    CHECK(index.postings().at("ark") == std::vector<Posting>{{0, 2}});

    CHECK_THROWS_MATCHES(KeywordIndex::build(std::vector<Document>{}), Error,
                         Catch::Matchers::Predicate<Error>([](const Error& e) {
                             return e.code() == ErrorCode::EmptyCorpus;
                         }));
    const std::vector<Document> dup{doc("71", "a"), doc("71", "b")};
    CHECK_THROWS_AS(KeywordIndex::build(dup), Error);
}

TEST_CASE("BM25 toy corpus matches hand computation", "[bm25]") {
    const std::vector<Document> docs{doc("71", "ark noah"), doc("72", "moses flood"), doc("73", "temple priest")};
    const auto index = KeywordIndex::build(docs);
    const std::vector<std::string> ark{"ark"};
    // df = 1 of N = 3, tf = 1, len = avg: IDF ln(1 + 2.5/1.5), weight 1.
    CHECK(index.score(ark, "71") == Approx(std::log(1.0 + 2.5 / 1.5)).margin(1e-12));
    CHECK(index.score(ark, "71") == Approx(0.9808).margin(1e-4));
    CHECK(index.score(ark, "72") == 0.0);
    const std::vector<std::string> nothing{"crucifixion"};
    CHECK(index.score(nothing, "71") == 0.0);
    CHECK_THROWS_AS(index.score(ark, "74"), Error);

    const std::vector<Document> same{doc("71", "ark"), doc("72", "ark flood"), doc("73", "ark ark")};
    const auto common = KeywordIndex::build(same);
    CHECK(common.idf(3) == Approx(std::log(1.0 + 0.5 / 3.5)).margin(1e-15));
    CHECK(common.score(ark, "71") > 0.0);
}

TEST_CASE("repeated query words do not change the score", "[bm25]") {
    const std::vector<Document> docs{doc("71", "ark noah"), doc("72", "ark flood dove")};
    const auto index = KeywordIndex::build(docs);
    const std::vector<std::string> once{"ark", "dove"};
    const std::vector<std::string> twice{"ark", "dove", "ark"};
    CHECK(index.score(once, "72") == index.score(twice, "72"));
}

TEST_CASE("keyword search ranks, excludes zero scores and breaks ties by notation", "[bm25]") {
    const std::vector<Document> docs{doc("73", "noah ark"), doc("71", "noah ark"), doc("72", "moses")};
    const auto index = KeywordIndex::build(docs);
    const auto hits = index.search("the ark of noah", 10);
    CHECK(codes_of(hits) == std::vector<std::string>{"71", "73"});
    check_ranked_list(hits);
    CHECK(index.search("crucifixion", 5).empty());
    CHECK(index.search("", 5).empty());
    CHECK(codes_of(index.search("moses", 5)) == std::vector<std::string>{"72"});
}

TEST_CASE("BM25 weight grows with term frequency and IDF stays positive", "[bm25][property]") {
    std::mt19937_64 rng(3);
    const auto docs = testdata::random_documents(rng, 40);
    const auto index = KeywordIndex::build(docs);
    for (std::uint32_t len = 1; len < 20; ++len) {
        for (std::uint32_t tf = 1; tf < len; ++tf) CHECK(index.term_weight(tf + 1, len) >= index.term_weight(tf, len));
    }
    for (std::size_t df = 0; df <= index.doc_count(); ++df) CHECK(index.idf(df) > 0.0);

    const double total = std::accumulate(index.doc_lengths().begin(), index.doc_lengths().end(), 0.0);
    CHECK(index.avg_doc_length() == total / static_cast<double>(index.doc_count()));
    for (const auto& [term, list] : index.postings()) {
        for (const auto& p : list) CHECK(p.doc < index.doc_count());
    }
}

TEST_CASE("keyword search equals a score-everything oracle", "[bm25][property]") {
    std::mt19937_64 rng(5);
    for (std::size_t n : {1u, 7u, 60u, 300u}) {
        const auto docs = testdata::random_documents(rng, n);
        const Bm25Params params{1.2 + static_cast<double>(n % 3) * 0.3, n % 2 ? 0.75 : 0.5};
        const auto index = KeywordIndex::build(docs, params);
        const auto corpus = oracle_corpus(docs, params);
        for (int q = 0; q < 20; ++q) {
            const auto query = testdata::random_text(rng, 1, 5);
            const auto terms = tokenize(query);
            std::vector<std::pair<std::string, double>> scored;
            for (std::size_t i = 0; i < docs.size(); ++i) {
                const double s = corpus.score(terms, i);
                CHECK(index.score(terms, docs[i].id.raw()) == s);
                if (s > 0) scored.emplace_back(docs[i].id.raw(), s);
            }
            const auto expected = oracle::rank_desc(scored);
            const auto hits = index.search(query, n);
            REQUIRE(codes_of(hits) == expected);
            check_ranked_list(hits);
            for (const auto& h : hits) CHECK(h.score == corpus.score(terms, *index.index_of(h.code.raw())));
        }
    }
}

TEST_CASE("cosine distance basics", "[vector]") {
    const std::vector<double> v{0.3, -1.2, 2.0};
    CHECK(cosine_distance(v, v) == Approx(0.0).margin(1e-15));
    CHECK(cosine_distance(std::vector<double>{1, 0}, std::vector<double>{0, 1}) == 1.0);
    CHECK(cosine_distance(std::vector<double>{1, 0}, std::vector<double>{-1, 0}) == 2.0);
    CHECK_THROWS_AS(cosine_distance(std::vector<double>{1, 0}, std::vector<double>{1, 0, 0}), Error);
    CHECK_THROWS_AS(cosine_distance(std::vector<double>{0, 0}, std::vector<double>{1, 0}), Error);
}

TEST_CASE("vector search orders by distance", "[vector]") {
    VectorIndex index(2);
    const double pi = std::acos(-1.0);
    const std::vector<std::pair<const char*, double>> rows{{"71", 0.0}, {"72", pi / 3}, {"73", pi / 6}};
    for (const auto& [id, angle] : rows) index.add(parse_code(id), std::vector<double>{std::cos(angle), std::sin(angle)});
    const std::vector<double> query{1.0, 0.0};
    const auto hits = index.search(query, 10);
    CHECK(codes_of(hits) == std::vector<std::string>{"71", "73", "72"});
    CHECK(hits[0].score == Approx(1.0).margin(1e-15));
    CHECK(hits[1].score == Approx(std::cos(pi / 6)).margin(1e-12));
    CHECK(hits[2].score == Approx(0.5).margin(1e-12));
    check_ranked_list(hits);

    CHECK_THROWS_AS(index.search(std::vector<double>{1.0}, 1), Error);
    CHECK_THROWS_AS(index.add(parse_code("71"), std::vector<double>{0.0, 1.0}), Error);
    CHECK_THROWS_AS(index.add(parse_code("74"), std::vector<double>{0.0, 0.0}), Error);
}

TEST_CASE("vector search equals brute force and finds every stored row", "[vector][property]") {
    std::mt19937_64 rng(17);
    std::normal_distribution<double> gauss;
    const std::size_t dim = 24;
    VectorIndex index(dim);
    std::vector<std::vector<double>> rows;
    std::vector<std::string> ids;
    for (std::size_t i = 0; i < 200; ++i) {
        std::vector<double> v(dim);
        for (auto& x : v) x = gauss(rng);
        ids.push_back(testdata::doc_id(i));
        index.add(parse_code(ids.back()), v);
        rows.push_back(std::move(v));
    }
    for (std::size_t q = 0; q < 30; ++q) {
        std::vector<double> query(dim);
        for (auto& x : query) x = gauss(rng);
        std::vector<std::pair<std::string, double>> scored;
        for (std::size_t i = 0; i < rows.size(); ++i) {
            scored.emplace_back(ids[i], -oracle::cosine_distance(query, rows[i]));
        }
        auto expected = oracle::rank_desc(scored);
        expected.resize(25);
        CHECK(codes_of(index.search(query, 25)) == expected);
    }
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto hits = index.search(rows[i], 1);
        CHECK(hits.front().code.raw() == ids[i]);
        CHECK(1.0 - hits.front().score == Approx(0.0).margin(1e-7));
    }
}

TEST_CASE("hybrid fusion of a two-document pool", "[hybrid]") {
    const std::vector<Document> docs{doc("71", "ark"), doc("72", "flood")};
    const auto keyword = KeywordIndex::build(docs);
    VectorIndex vectors(2);
    vectors.add(parse_code("71"), std::vector<double>{1.0, 0.0});
    vectors.add(parse_code("72"), std::vector<double>{0.0, 1.0});
    const std::vector<double> query{0.2, 1.0};

    const auto pool = hybrid_candidates(keyword, vectors, "ark", query, {0.75, 100});
    REQUIRE(pool.size() == 2);
    CHECK(pool[0].keyword_norm == 1.0);
    CHECK(pool[1].keyword_norm == 0.0);
    CHECK(pool[0].vector_norm == 0.0);
    CHECK(pool[1].vector_norm == 1.0);
    CHECK(pool[0].fused == Approx(0.25));
    CHECK(pool[1].fused == Approx(0.75));

    const auto hits = hybrid_search(keyword, vectors, "ark", query, {0.75, 100}, 5);
    CHECK(codes_of(hits) == std::vector<std::string>{"72", "71"});
    CHECK_THROWS_AS(hybrid_search(keyword, vectors, "ark", query, {1.5, 100}, 5), Error);
    CHECK_THROWS_AS(hybrid_search(keyword, vectors, "ark", query, {-0.1, 100}, 5), Error);
}

TEST_CASE("hybrid search agrees with the fusion oracle", "[hybrid][property]") {
    std::mt19937_64 rng(23);
    const auto docs = testdata::random_documents(rng, 150);
    const auto keyword = KeywordIndex::build(docs);
    const auto corpus = oracle_corpus(docs);
    VectorIndex vectors(64);
    std::vector<std::vector<double>> rows;
    std::vector<std::string> ids;
    for (const auto& d : docs) {
        rows.push_back(offline_embed(d.text, 64));
        vectors.add(d.id, rows.back());
        ids.push_back(d.id.raw());
    }
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int q = 0; q < 40; ++q) {
        const auto text = testdata::random_text(rng, 1, 4);
        const auto qv = offline_embed(text, 64);
        const double alpha = q % 4 == 0 ? 1.0 : q % 4 == 1 ? 0.0 : unit(rng);
        const std::size_t pool = 5 + static_cast<std::size_t>(q);
        const auto terms = tokenize(text);
        std::vector<double> kw, dist;
        for (std::size_t i = 0; i < docs.size(); ++i) {
            kw.push_back(corpus.score(terms, i));
            dist.push_back(oracle::cosine_distance(qv, rows[i]));
        }
        const auto fused = oracle::hybrid(ids, kw, dist, alpha, pool);
        const auto got = hybrid_candidates(keyword, vectors, text, qv, {alpha, pool});
        REQUIRE(got.size() == fused.size());
        std::vector<std::pair<std::string, double>> expected_scores;
        for (const auto& f : fused) expected_scores.emplace_back(f.id, f.fused);
        for (const auto& c : got) {
            const auto& id = vectors.ids()[c.doc].raw();
            const auto it = std::find_if(fused.begin(), fused.end(), [&](const auto& f) { return f.id == id; });
            REQUIRE(it != fused.end());
            CHECK(c.fused == Approx(it->fused).margin(1e-12));
            CHECK(c.fused >= 0.0);
            CHECK(c.fused <= 1.0);
        }
        const auto hits = hybrid_search(keyword, vectors, text, qv, {alpha, pool}, 10);
        check_ranked_list(hits);
        auto expected = oracle::rank_desc(expected_scores);
        expected.resize(std::min<std::size_t>(10, expected.size()));
        CHECK(codes_of(hits) == expected);
    }
}

TEST_CASE("image vote follows plurality then nearest support", "[vote]") {
    const auto ref = [](double angle, std::vector<const char*> labels) {
        ReferenceImage r{{std::cos(angle), std::sin(angle)}, {}};
        for (const char* l : labels) r.labels.push_back(parse_code(l));
        return r;
    };
    const std::vector<double> query{1.0, 0.0};

    // Neighbors by rank: B, A, A, A, A, A, B, B, B, B.
    std::vector<ReferenceImage> tie;
    tie.push_back(ref(0.01, {"72"}));
    for (int i = 0; i < 5; ++i) tie.push_back(ref(0.02 + 0.01 * i, {"71"}));
    for (int i = 0; i < 4; ++i) tie.push_back(ref(0.10 + 0.01 * i, {"72"}));
    const auto tied = image_vote_classify(query, ImageReferenceSet(tie), 10);
    CHECK(tied.winner.raw() == "72");
    REQUIRE(tied.table.size() == 2);
    CHECK(tied.table[0].votes == 5);
    CHECK(tied.table[0].best_rank == 1);
    CHECK(tied.table[1].best_rank == 2);

    std::vector<ReferenceImage> plural;
    for (int i = 0; i < 3; ++i) plural.push_back(ref(0.01 * i, {"73"}));
    for (int i = 0; i < 4; ++i) plural.push_back(ref(0.05 + 0.01 * i, {"71"}));
    for (int i = 0; i < 3; ++i) plural.push_back(ref(0.10 + 0.01 * i, {"72"}));
    CHECK(image_vote_classify(query, ImageReferenceSet(plural), 10).winner.raw() == "71");

    CHECK_THROWS_AS(ImageReferenceSet({}), Error);
    CHECK_THROWS_AS(image_vote_classify(std::vector<double>{1, 0, 0}, ImageReferenceSet(plural), 3), Error);
}

TEST_CASE("image vote totals equal the neighbors' label counts", "[vote][property]") {
    std::mt19937_64 rng(29);
    std::normal_distribution<double> gauss;
    std::uniform_int_distribution<int> nlabels(1, 3);
    std::uniform_int_distribution<int> label(0, 5);
    std::vector<ReferenceImage> rows;
    for (int i = 0; i < 60; ++i) {
        ReferenceImage r{{gauss(rng), gauss(rng), gauss(rng), gauss(rng)}, {}};
        const int n = nlabels(rng);
        for (int j = 0; j < n; ++j) {
            auto code = parse_code("7" + std::to_string(label(rng)));
            if (std::find(r.labels.begin(), r.labels.end(), code) == r.labels.end()) r.labels.push_back(code);
        }
        rows.push_back(std::move(r));
    }
    const ImageReferenceSet refs(rows);
    for (std::size_t k = 1; k <= 15; ++k) {
        const std::vector<double> q{gauss(rng), gauss(rng), gauss(rng), gauss(rng)};
        const auto result = image_vote_classify(q, refs, k);
        REQUIRE(result.neighbors.size() == k);
        std::size_t labels = 0;
        for (const auto& n : result.neighbors) labels += rows[n.row].labels.size();
        std::size_t votes = 0;
        for (const auto& row : result.table) votes += row.votes;
        CHECK(votes == labels);
        CHECK(result.winner == result.table.front().code);
        for (const auto& row : result.table) CHECK(row.votes <= result.table.front().votes);
    }
}
