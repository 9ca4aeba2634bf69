#pragma once

#include <random>
#include <string>
#include <vector>

#include "iconrag/taxonomy/code.hpp"
#include "iconrag/taxonomy/documents.hpp"

namespace bench {

inline const std::vector<std::string>& words() {
    static const std::vector<std::string> w{
        "christ", "apostle", "feet",   "washing", "supper",  "noah",    "ark",    "flood",   "david",
        "goliath", "sling",  "giant",  "temple",  "priest",  "angel",   "virgin", "child",   "shepherd",
        "king",   "crown",   "sword",  "battle",  "mountain", "river",  "tree",   "garden",  "serpent",
        "moses",  "tablets", "law",    "desert",  "manna",   "cross",   "tomb",   "prophet", "lamb"};
    return w;
}

inline std::string sentence(std::mt19937_64& rng, int min_words, int max_words) {
    std::uniform_int_distribution<std::size_t> pick(0, words().size() - 1);
    std::uniform_int_distribution<int> len(min_words, max_words);
    std::string s;
    for (int i = len(rng); i > 0; --i) s += (s.empty() ? "" : " ") + words()[pick(rng)];
    return s;
}

inline std::string code(std::size_t i) { return "7" + std::to_string(10000000 + i); }

/// `n` synthetic taxonomy-like documents.
inline std::vector<iconrag::Document> documents(std::size_t n, std::uint64_t seed = 1) {
    std::mt19937_64 rng(seed);
    std::vector<iconrag::Document> docs;
    docs.reserve(n);
    for (std::size_t i = 0; i < n; ++i) docs.push_back({iconrag::parse_code(code(i)), sentence(rng, 3, 25)});
    return docs;
}

}  // namespace bench
