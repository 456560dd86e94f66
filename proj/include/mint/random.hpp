#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace mint {

using Rng = std::mt19937_64;

// SplitMix64 finalizer (Steele, Lea & Flood). Bijective on 64-bit words.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Derives a child seed from a parent seed and a path of integer coordinates:
//   h = splitmix64(parent); for each k: h = splitmix64(h ^ splitmix64(k + 1))
// Used for every per-task seed so results do not depend on evaluation order.
constexpr std::uint64_t derive_seed(std::uint64_t parent,
                                    std::initializer_list<std::uint64_t> path) {
    std::uint64_t h = splitmix64(parent);
    for (std::uint64_t k : path) h = splitmix64(h ^ splitmix64(k + 1));
    return h;
}

}  // namespace mint
