#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

namespace segquery {

// All randomness in this project flows through the splitmix64 generator below.
// Standard-library distributions and std::shuffle are implementation-defined,
// which would break the byte-identical reproducibility contract, so sampling,
// shuffling and the oracle drop protocol are all specified here.

/// One splitmix64 step: advances the state and returns the next 64-bit value.
std::uint64_t splitmix64_next(std::uint64_t& state);

/// FNV-1a over bytes; used to fold string keys (image ids) into stream seeds.
std::uint64_t fnv1a64(std::string_view bytes);

/// Deterministic combination of two 64-bit values into a new seed.
std::uint64_t mix64(std::uint64_t a, std::uint64_t b);

/// Maps a hash to [0,1) using the top 53 bits.
double unit_from_hash(std::uint64_t h);

class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() { return splitmix64_next(state_); }

    /// Unbiased draw in [0, n) via rejection sampling. n must be > 0.
    std::uint64_t below(std::uint64_t n);

    /// Uniform double in [0,1).
    double unit() { return unit_from_hash(next()); }

    /// Fisher-Yates shuffle.
    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    std::uint64_t state_;
};

/// Per-key stream: derive_rng(seed, image_id) gives every image its own
/// deterministic stream regardless of processing order.
Rng derive_rng(std::uint64_t seed, std::string_view key);

}  // namespace segquery
