#ifndef VIBDIAG_DETAIL_RNG_HPP
#define VIBDIAG_DETAIL_RNG_HPP

#include <cmath>
#include <cstdint>
#include <random>

// Seed-substream helpers. Every random decision in the library flows from a
// single user seed through mix_seed(), so serial and parallel schedules see
// the same streams.

namespace vibdiag::detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
    return splitmix64(splitmix64(seed) ^ splitmix64(stream ^ 0xa5a5a5a5a5a5a5a5ULL));
}

inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
    return mix_seed(mix_seed(seed, a), b);
}

// Named substreams of the user seed. Units of work that may be scheduled in
// parallel (trees, folds, trials, recordings) each get their own stream so
// results never depend on execution order.
inline constexpr std::uint64_t kStreamSynth = 1; // per (class, recording) noise
inline constexpr std::uint64_t kStreamSplit = 2; // per-class train/test shuffle
inline constexpr std::uint64_t kStreamFold = 3;  // per-class CV fold shuffle
inline constexpr std::uint64_t kStreamTree = 4;  // per-tree bootstrap + splits
inline constexpr std::uint64_t kStreamTrial = 5;   // per-trial acquisition candidates
inline constexpr std::uint64_t kStreamInit = 6;    // tuner initial-design rotation
inline constexpr std::uint64_t kStreamCvTrain = 7; // per-fold training inside CV

/// Minimal counter-based engine (splitmix64 sequence). Cheap to construct,
/// full-period 64-bit output; used where a fresh substream per work unit is
/// wanted without mt19937_64's state-size cost.
struct SplitMix64 {
    std::uint64_t state;
    explicit SplitMix64(std::uint64_t seed) : state(seed) {}
    std::uint64_t operator()() {
        state += 0x9e3779b97f4a7c15ULL;
        std::uint64_t x = state;
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
        return x ^ (x >> 31);
    }
};

/// Uniform double in [0, 1) with 53 random bits.
template <class Engine>
inline double next_unit(Engine& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Standard normal via Box-Muller. std::normal_distribution is not
/// bit-stable across standard libraries; this is.
template <class Engine>
inline double next_gaussian(Engine& rng) {
    const double u1 = 1.0 - next_unit(rng); // (0, 1]
    const double u2 = next_unit(rng);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
}

/// Uniform integer in [0, bound) by rejection (unbiased, engine-order stable).
template <class Engine>
inline std::uint64_t next_below(Engine& rng, std::uint64_t bound) {
    const std::uint64_t limit = bound * (UINT64_MAX / bound);
    std::uint64_t x;
    do {
        x = rng();
    } while (x >= limit);
    return x % bound;
}

} // namespace vibdiag::detail

#endif
