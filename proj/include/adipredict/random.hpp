#pragma once

#include <cstdint>
#include <numeric>
#include <random>
#include <span>
#include <string_view>
#include <vector>

namespace adipredict {

/// 64-bit linear congruential generator (Knuth MMIX constants):
///   state <- state * 6364136223846793005 + 1442695040888963407 (mod 2^64)
/// Each draw advances the state once and returns the upper 32 bits. Fold
/// plans are defined in terms of this generator so they reproduce exactly
/// in any language with 64-bit unsigned wraparound.
class Lcg64 {
public:
    static constexpr std::uint64_t multiplier = 6364136223846793005ULL;
    static constexpr std::uint64_t increment = 1442695040888963407ULL;

    explicit Lcg64(std::uint64_t seed) noexcept : state_(seed) {}

    std::uint32_t next() noexcept
    {
        state_ = state_ * multiplier + increment;
        return static_cast<std::uint32_t>(state_ >> 32);
    }

    /// Uniform-ish integer in [0, bound) by modulo reduction of the upper bits.
    std::uint32_t below(std::uint32_t bound) noexcept { return next() % bound; }

private:
    std::uint64_t state_;
};

/// SplitMix64 finalizer; used to decorrelate derived seeds.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// FNV-1a, 64-bit. Stable across platforms and runs.
constexpr std::uint64_t fnv1a(std::string_view text) noexcept
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) noexcept
{
    return mix64(seed ^ mix64(stream + 0x632be59bd9b4e019ULL));
}

/// Engine plus distribution helpers written out by hand, so draws do not
/// depend on the standard library's distribution implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t bits() { return engine_(); }

    /// Uniform in [0, 1).
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [0, bound).
    std::size_t index(std::size_t bound) { return static_cast<std::size_t>(engine_() % bound); }

    /// Standard normal via Box-Muller (one value per call).
    double normal();

    template <typename T>
    void shuffle(std::span<T> values)
    {
        for (std::size_t i = values.size(); i > 1; --i) {
            std::swap(values[i - 1], values[index(i)]);
        }
    }

    /// First `count` entries of a random permutation of [0, n).
    std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t count);

private:
    std::mt19937_64 engine_;
};

} // namespace adipredict
