#pragma once

// Shared helpers for the unit and acceptance binaries: temp dirs, subprocess
// runner, synthetic dataset generation, and naive pixel-loop oracles that the
// metric tests compare against.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>
#include <sys/wait.h>
#include <unistd.h>

#include "segquery/label_map.hpp"
#include "segquery/manifest.hpp"
#include "segquery/mask.hpp"
#include "segquery/rng.hpp"

namespace testsupport {

class TempDir {
public:
    TempDir() {
        std::string tmpl =
            (std::filesystem::temp_directory_path() / "segquery-test-XXXXXX").string();
        if (mkdtemp(tmpl.data()) == nullptr) {
            throw std::runtime_error("mkdtemp failed");
        }
        path_ = tmpl;
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

inline void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << content;
}

struct CommandResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

inline std::string shell_quote(const std::string& s) {
    std::string quoted = "'";
    for (char c : s) {
        if (c == '\'') {
            quoted += "'\\''";
        } else {
            quoted += c;
        }
    }
    quoted += "'";
    return quoted;
}

/// Runs a shell command, capturing stdout, stderr, and the exit code.
inline CommandResult run_command(const std::string& command) {
    TempDir scratch;
    const std::filesystem::path err_path = scratch.path() / "stderr";
    CommandResult result;
    FILE* pipe = popen((command + " 2>" + shell_quote(err_path.string())).c_str(), "r");
    if (pipe == nullptr) {
        throw std::runtime_error("popen failed for: " + command);
    }
    char buffer[4096];
    std::size_t n = 0;
    while ((n = fread(buffer, 1, sizeof(buffer), pipe)) > 0) {
        result.out.append(buffer, n);
    }
    const int status = pclose(pipe);
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    result.err = read_file(err_path);
    return result;
}

inline std::string segquery_binary() { return SEGQUERY_BIN; }

inline std::string fixture_dir() { return SEGQUERY_FIXTURE_DIR; }

// ------------------------------------------------------------ synthetic data

struct SyntheticSpec {
    std::size_t images = 10;
    std::uint32_t width = 32;
    std::uint32_t height = 32;
    std::size_t classes = 12;
    std::uint64_t seed = 1;
    bool with_ignore = true;
};

/// Writes label maps plus a manifest.json into dir and returns the manifest
/// path. Every image is guaranteed at least one present class.
inline std::filesystem::path write_synthetic_manifest(const std::filesystem::path& dir,
                                                      const SyntheticSpec& spec = {}) {
    namespace fs = std::filesystem;
    using segquery::ClassId;
    fs::create_directories(dir / "maps");

    nlohmann::ordered_json categories = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < spec.classes; ++i) {
        categories.push_back({{"id", i},
                              {"name", "class " + std::to_string(i)},
                              {"aliases", {"c" + std::to_string(i)}}});
    }

    nlohmann::ordered_json images = nlohmann::ordered_json::array();
    segquery::Rng rng(spec.seed);
    for (std::size_t n = 0; n < spec.images; ++n) {
        std::vector<ClassId> pool;
        for (std::size_t i = 0; i < spec.classes; ++i) {
            pool.push_back(static_cast<ClassId>(i));
        }
        rng.shuffle(pool);
        const std::size_t chosen =
            2 + static_cast<std::size_t>(rng.below(std::min<std::uint64_t>(5, spec.classes - 1)));
        pool.resize(std::min(chosen, spec.classes));

        segquery::LabelGrid grid(spec.height, spec.width);
        ClassId* pixels = grid.data();
        const std::uint64_t total = static_cast<std::uint64_t>(spec.width) * spec.height;
        for (std::uint64_t i = 0; i < total; ++i) {
            if (spec.with_ignore && rng.below(8) == 0) {
                pixels[i] = segquery::kIgnoreId;
            } else {
                pixels[i] = pool[static_cast<std::size_t>(rng.below(pool.size()))];
            }
        }
        pixels[0] = pool[0];  // at least one present class

        const std::string image_id = "img" + std::to_string(n);
        const std::string rel = "maps/" + image_id + ".lseg";
        segquery::LabelMap map{std::move(grid)};
        segquery::write_label_map(dir / rel, map);
        images.push_back({{"id", image_id}, {"labelmap", rel}, {"present", map.present_ids()}});
    }

    nlohmann::ordered_json manifest;
    manifest["categories"] = std::move(categories);
    manifest["images"] = std::move(images);
    const fs::path manifest_path = dir / "manifest.json";
    write_file(manifest_path, manifest.dump(2) + "\n");
    return manifest_path;
}

// -------------------------------------------------------- brute-force oracles

inline std::uint64_t naive_intersection(const segquery::BinaryMask& a,
                                        const segquery::BinaryMask& b) {
    std::uint64_t count = 0;
    for (Eigen::Index r = 0; r < a.rows(); ++r) {
        for (Eigen::Index c = 0; c < a.cols(); ++c) {
            if (a(r, c) && b(r, c)) {
                ++count;
            }
        }
    }
    return count;
}

inline std::uint64_t naive_union(const segquery::BinaryMask& a, const segquery::BinaryMask& b) {
    std::uint64_t count = 0;
    for (Eigen::Index r = 0; r < a.rows(); ++r) {
        for (Eigen::Index c = 0; c < a.cols(); ++c) {
            if (a(r, c) || b(r, c)) {
                ++count;
            }
        }
    }
    return count;
}

inline segquery::BinaryMask random_mask(segquery::Rng& rng, Eigen::Index rows, Eigen::Index cols,
                                        std::uint64_t density_num = 1,
                                        std::uint64_t density_den = 2) {
    segquery::BinaryMask mask(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
        for (Eigen::Index c = 0; c < cols; ++c) {
            mask(r, c) = rng.below(density_den) < density_num;
        }
    }
    return mask;
}

}  // namespace testsupport
