#pragma once

#include <cstddef>
#include <vector>

#include "iconrag/taxonomy/code.hpp"

namespace iconrag {

struct RankedHit {
    IconclassCode code;
    double score = 0.0;
    std::size_t rank = 0;  ///< 1-based
};

using RankedList = std::vector<RankedHit>;

}  // namespace iconrag
