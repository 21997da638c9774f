#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace segquery {

/// Row-major boolean pixel grid; rows = height, cols = width.
using BinaryMask = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Run lengths in row-major order, alternating runs of 0s and 1s with the
/// first run counting 0s (possibly zero-length). No interior zero-length
/// runs. An empty mask encodes to an empty run list.
std::vector<std::uint64_t> rle_encode(const BinaryMask& mask);

/// Inverse of rle_encode. Throws ValidationError when the runs do not sum to
/// width * height or contain an interior zero run.
BinaryMask rle_decode(const std::vector<std::uint64_t>& runs, std::uint32_t width,
                      std::uint32_t height);

/// Wire/JSONL text form: comma-separated decimal run lengths, e.g. "1,2,1".
std::string rle_to_text(const std::vector<std::uint64_t>& runs);
std::vector<std::uint64_t> rle_from_text(std::string_view text);

inline std::uint64_t intersection_count(const BinaryMask& a, const BinaryMask& b) {
    return static_cast<std::uint64_t>((a && b).count());
}

inline std::uint64_t union_count(const BinaryMask& a, const BinaryMask& b) {
    return static_cast<std::uint64_t>((a || b).count());
}

}  // namespace segquery
