#include "segquery/mask.hpp"

#include <charconv>

#include "segquery/errors.hpp"

namespace segquery {

std::vector<std::uint64_t> rle_encode(const BinaryMask& mask) {
    const std::uint64_t total = static_cast<std::uint64_t>(mask.size());
    if (total == 0) {
        return {};
    }
    std::vector<std::uint64_t> runs;
    const bool* bits = mask.data();  // row-major storage
    bool current = false;            // encoding always starts with a 0-run
    std::uint64_t run = 0;
    for (std::uint64_t i = 0; i < total; ++i) {
        if (bits[i] == current) {
            ++run;
        } else {
            runs.push_back(run);
            current = bits[i];
            run = 1;
        }
    }
    runs.push_back(run);
    return runs;
}

BinaryMask rle_decode(const std::vector<std::uint64_t>& runs, std::uint32_t width,
                      std::uint32_t height) {
    const std::uint64_t total = static_cast<std::uint64_t>(width) * height;
    std::uint64_t sum = 0;
    for (std::size_t i = 0; i < runs.size(); ++i) {
        if (i > 0 && runs[i] == 0) {
            throw ValidationError("rle: interior zero-length run at position " + std::to_string(i));
        }
        sum += runs[i];
    }
    if (sum != total) {
        throw ValidationError("rle: runs sum to " + std::to_string(sum) + " but mask has " +
                              std::to_string(total) + " pixels");
    }
    BinaryMask mask(height, width);
    bool* bits = mask.data();
    std::uint64_t pos = 0;
    bool value = false;
    for (std::uint64_t run : runs) {
        for (std::uint64_t i = 0; i < run; ++i) {
            bits[pos++] = value;
        }
        value = !value;
    }
    return mask;
}

std::string rle_to_text(const std::vector<std::uint64_t>& runs) {
    std::string out;
    for (std::size_t i = 0; i < runs.size(); ++i) {
        if (i > 0) {
            out.push_back(',');
        }
        out += std::to_string(runs[i]);
    }
    return out;
}

std::vector<std::uint64_t> rle_from_text(std::string_view text) {
    std::vector<std::uint64_t> runs;
    if (text.empty()) {
        return runs;
    }
    const char* p = text.data();
    const char* end = p + text.size();
    while (p < end) {
        std::uint64_t value = 0;
        auto [next, ec] = std::from_chars(p, end, value);
        if (ec != std::errc{} || (next < end && *next != ',')) {
            throw ValidationError("rle: malformed run list '" + std::string(text) + "'");
        }
        runs.push_back(value);
        p = next < end ? next + 1 : next;
        if (p == end && next < end) {
            throw ValidationError("rle: trailing separator in '" + std::string(text) + "'");
        }
    }
    return runs;
}

}  // namespace segquery
