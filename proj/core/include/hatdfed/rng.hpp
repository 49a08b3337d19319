#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace hatdfed {

using Rng = std::mt19937_64;

// One root seed fans out to named independent streams so that changing the
// draw count of one component cannot perturb the others.
inline std::uint64_t stream_tag(std::string_view name) {
    std::uint64_t h = 14695981039346656037ull;  // FNV-1a
    for (unsigned char c : name) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

inline Rng make_stream(std::uint64_t root_seed, std::string_view name) {
    std::uint64_t tag = stream_tag(name);
    std::seed_seq seq{
        static_cast<std::uint32_t>(root_seed),
        static_cast<std::uint32_t>(root_seed >> 32),
        static_cast<std::uint32_t>(tag),
        static_cast<std::uint32_t>(tag >> 32),
    };
    return Rng(seq);
}

inline double uniform01(Rng& rng) {
    return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

}  // namespace hatdfed
