#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace ambient {

// splitmix64 finalizer; used to derive independent stream seeds.
inline constexpr std::uint64_t mix_seed(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline constexpr std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> parts) {
    std::uint64_t h = mix_seed(seed);
    for (auto p : parts) h = mix_seed(h ^ mix_seed(p + 0x632be59bd9b4e019ULL));
    return h;
}

using Rng = std::mt19937_64;

}  // namespace ambient
