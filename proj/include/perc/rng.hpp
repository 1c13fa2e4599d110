#pragma once

#include <cstdint>
#include <string_view>

namespace perc {

// Counter-based bit generation: the status of (sample, site) is a pure
// function of (global seed, stream tag, sample index, site index, p), so any
// worker can produce any sample in any order and the results agree bit for
// bit with a single-threaded run.

inline constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

// splitmix64 finalizer (Vigna); passes BigCrush as the core of SplitMix64.
inline std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// FNV-1a, used to derive stream tags from estimator names.
inline std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

struct SeedSpec {
    std::uint64_t global_seed = 0;
};

// Key of the per-sample bit stream.
inline std::uint64_t stream_key(const SeedSpec& seed, std::uint64_t stream_tag, std::uint64_t sample_index) {
    std::uint64_t k = mix64(seed.global_seed ^ (stream_tag * 0xd1342543de82ef95ULL + kGolden));
    return mix64(k + (sample_index + 1) * kGolden);
}

inline std::uint64_t site_word(std::uint64_t key, std::uint64_t site_index) {
    return mix64(key + (site_index + 1) * kGolden);
}

// Acceptance threshold for P(bit = 1) = p; the bit is (word < threshold).
// Valid for p in (0,1); resolution is 2^-64.
std::uint64_t bernoulli_threshold(double p);

inline bool bernoulli_bit(std::uint64_t key, std::uint64_t site_index, std::uint64_t threshold) {
    return site_word(key, site_index) < threshold;
}

}  // namespace perc
