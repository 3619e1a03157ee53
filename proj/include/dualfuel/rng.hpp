#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <random>

namespace dualfuel {

/// SplitMix64 finalizer. Bijective on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t x)
{
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Seed of ensemble member `index`: mix64(base ^ mix64(index)).
/// Run i can be reproduced in isolation from (base, i) alone.
constexpr std::uint64_t episode_seed(std::uint64_t base, std::uint64_t index)
{
    return mix64(base ^ mix64(index));
}

/// Episode random stream. Wraps mt19937_64 with draws whose results do
/// not depend on the standard library's distribution implementations.
class Rng
{
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Uniform integer in [0, n). n must be positive.
    std::size_t index(std::size_t n)
    {
        const std::uint64_t bound = n;
        const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                    std::numeric_limits<std::uint64_t>::max() % bound;
        std::uint64_t draw = engine_();
        while (draw >= limit)
            draw = engine_();
        return static_cast<std::size_t>(draw % bound);
    }

private:
    std::mt19937_64 engine_;
};

} // namespace dualfuel
