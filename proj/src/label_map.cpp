#include "segquery/label_map.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>

#include "segquery/errors.hpp"

namespace segquery {

namespace {

constexpr char kMagic[4] = {'L', 'S', 'E', 'G'};

std::uint32_t read_u32le(const unsigned char* p) {
    return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
           (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

void write_u32le(std::ostream& out, std::uint32_t v) {
    char bytes[4] = {static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff),
                     static_cast<char>((v >> 16) & 0xff), static_cast<char>((v >> 24) & 0xff)};
    out.write(bytes, 4);
}

}  // namespace

std::vector<ClassId> LabelMap::present_ids() const {
    std::vector<ClassId> ids(grid_.data(), grid_.data() + grid_.size());
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    std::erase(ids, kIgnoreId);
    return ids;
}

LabelMap read_label_map(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ValidationError("label map '" + path.string() + "': cannot open file");
    }
    std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                     std::istreambuf_iterator<char>());
    if (bytes.size() < 12 || std::memcmp(bytes.data(), kMagic, 4) != 0) {
        throw ValidationError("label map '" + path.string() + "': bad magic or truncated header");
    }
    const std::uint32_t width = read_u32le(bytes.data() + 4);
    const std::uint32_t height = read_u32le(bytes.data() + 8);
    const std::uint64_t expected = 12 + 2ULL * width * height;
    if (bytes.size() != expected) {
        throw ValidationError("label map '" + path.string() + "': expected " +
                              std::to_string(expected) + " bytes, got " +
                              std::to_string(bytes.size()));
    }
    LabelGrid grid(height, width);
    const unsigned char* p = bytes.data() + 12;
    ClassId* pixels = grid.data();
    for (std::uint64_t i = 0; i < static_cast<std::uint64_t>(width) * height; ++i) {
        pixels[i] = static_cast<ClassId>(p[2 * i] | (p[2 * i + 1] << 8));
    }
    return LabelMap(std::move(grid));
}

void write_label_map(const std::filesystem::path& path, const LabelMap& map) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw ValidationError("label map '" + path.string() + "': cannot open file for writing");
    }
    out.write(kMagic, 4);
    write_u32le(out, map.width());
    write_u32le(out, map.height());
    const ClassId* pixels = map.grid().data();
    for (std::uint64_t i = 0; i < static_cast<std::uint64_t>(map.width()) * map.height(); ++i) {
        char bytes[2] = {static_cast<char>(pixels[i] & 0xff), static_cast<char>(pixels[i] >> 8)};
        out.write(bytes, 2);
    }
    if (!out) {
        throw ValidationError("label map '" + path.string() + "': write failed");
    }
}

}  // namespace segquery
