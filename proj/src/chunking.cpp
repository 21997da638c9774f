#include "segquery/chunking.hpp"

#include <charconv>

#include "segquery/errors.hpp"

namespace segquery {

ChunkSpec ChunkSpec::parse(std::string_view text) {
    ChunkSpec spec;
    if (text == "N") {
        spec.kind = Kind::Whole;
        return spec;
    }
    if (text.size() > 2 && text.substr(0, 2) == "N/") {
        std::string_view divisor = text.substr(2);
        std::size_t value = 0;
        auto [p, ec] = std::from_chars(divisor.data(), divisor.data() + divisor.size(), value);
        if (ec != std::errc{} || p != divisor.data() + divisor.size() || value < 1) {
            throw ValidationError("chunk spec: bad divisor in '" + std::string(text) + "'");
        }
        spec.kind = Kind::Divisor;
        spec.divisor = value;
        return spec;
    }
    std::size_t value = 0;
    auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || p != text.data() + text.size() || value < 1) {
        throw ValidationError("chunk spec: expected N, N/<k>, or a positive integer, got '" +
                              std::string(text) + "'");
    }
    spec.kind = Kind::ExplicitSize;
    spec.size_per_chunk = value;
    return spec;
}

std::string ChunkSpec::to_string() const {
    switch (kind) {
        case Kind::Whole:
            return "N";
        case Kind::Divisor:
            return "N/" + std::to_string(divisor);
        case Kind::ExplicitSize:
            return std::to_string(size_per_chunk);
    }
    return "N";
}

std::vector<ClassId> ChunkPlan::flatten() const {
    std::vector<ClassId> out;
    for (const auto& chunk : chunks) {
        out.insert(out.end(), chunk.begin(), chunk.end());
    }
    return out;
}

ChunkPlan plan_chunks(std::span<const ClassId> ids, const ChunkSpec& spec) {
    if (ids.empty()) {
        throw ValidationError("plan_chunks: empty class list");
    }
    const std::size_t n = ids.size();
    std::size_t chunk_count = 1;
    switch (spec.kind) {
        case ChunkSpec::Kind::Whole:
            chunk_count = 1;
            break;
        case ChunkSpec::Kind::Divisor:
            chunk_count = std::min(spec.divisor, n);
            break;
        case ChunkSpec::Kind::ExplicitSize:
            chunk_count = (n + spec.size_per_chunk - 1) / spec.size_per_chunk;
            break;
    }
    // Sizes differ by at most one; the first n % chunk_count chunks take the
    // extra element.
    const std::size_t base = n / chunk_count;
    const std::size_t remainder = n % chunk_count;
    ChunkPlan plan;
    std::size_t offset = 0;
    for (std::size_t c = 0; c < chunk_count; ++c) {
        const std::size_t size = base + (c < remainder ? 1 : 0);
        plan.chunks.emplace_back(ids.begin() + offset, ids.begin() + offset + size);
        offset += size;
    }
    return plan;
}

}  // namespace segquery
