#pragma once

#include <cstdint>
#include <random>

namespace mixadc {

/// SplitMix64 finalizer; used to derive independent child seeds.
constexpr std::uint64_t mix_seed(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Child seed for stream `index` under `parent`. The seed tree used by the
/// experiments is experiment -> trial -> {code, noise, thresholds}.
constexpr std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t index) {
    return mix_seed(mix_seed(parent) ^ mix_seed(index + 0x632be59bd9b4e019ULL));
}

enum class Stream : std::uint64_t { code = 1, noise = 2, thresholds = 3, scene = 4 };

constexpr std::uint64_t derive_seed(std::uint64_t parent, Stream s) {
    return derive_seed(parent, static_cast<std::uint64_t>(s) << 48);
}

using Rng = std::mt19937_64;

}  // namespace mixadc
