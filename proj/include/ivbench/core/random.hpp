#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace ivbench {

// All randomized operations take one of these explicitly; nothing is global.
using Rng = std::mt19937_64;

// Mixes a master seed with a path of integer tags into an independent child
// seed (splitmix64 finalizer per step). Used to split one logical stream
// deterministically across iterations, folds, trees and tasks.
std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> tags);

inline Rng make_rng(std::uint64_t master, std::initializer_list<std::uint64_t> tags) {
    return Rng(derive_seed(master, tags));
}

// Uniform on [0, 1) with 53 random bits.
inline double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

double standard_normal(Rng& rng);

// Uniform integer in [0, n).
inline std::uint64_t uniform_index(Rng& rng, std::uint64_t n) {
    return std::uniform_int_distribution<std::uint64_t>(0, n - 1)(rng);
}

}  // namespace ivbench
