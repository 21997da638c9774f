#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "segquery/category.hpp"

namespace segquery {

/// Chunk-size specification: the whole list at once ("N"), a divisor of the
/// list ("N/2", "N/3", ...), or an explicit number of categories per chunk.
struct ChunkSpec {
    enum class Kind { Whole, Divisor, ExplicitSize };

    Kind kind = Kind::Whole;
    std::size_t divisor = 1;        // Kind::Divisor
    std::size_t size_per_chunk = 1; // Kind::ExplicitSize

    /// Parses "N", "N/<k>", or a positive integer. Throws ValidationError.
    static ChunkSpec parse(std::string_view text);

    std::string to_string() const;
};

/// Ordered partition of a class list into sub-query lists. Concatenating the
/// chunks reproduces the input exactly.
struct ChunkPlan {
    std::vector<std::vector<ClassId>> chunks;

    std::vector<ClassId> flatten() const;
};

/// Splits ids into chunks per the spec: "N" is one chunk, "N/k" yields
/// min(k, n) chunks, an explicit size s yields ceil(n/s) chunks. Sizes are
/// as equal as possible with earlier chunks taking the remainder, e.g. 10
/// ids at N/4 gives sizes 3,3,2,2. Throws ValidationError on an empty list.
ChunkPlan plan_chunks(std::span<const ClassId> ids, const ChunkSpec& spec);

}  // namespace segquery
