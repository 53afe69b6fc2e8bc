#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace idris {

using Rng = std::mt19937_64;

// Independent, reproducible sub-stream seed for (run seed, stream name).
std::uint64_t derive_seed(std::uint64_t seed, std::string_view stream);

inline double uniform01(Rng& rng) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); }

inline std::size_t uniform_index(Rng& rng, std::size_t n) {
    return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

}  // namespace idris
