#pragma once

#include <cmath>
#include <cstdint>

namespace ncs {

/// Minimal PCG32 generator. Chosen over <random> engines because the whole
/// pipeline (state transition, output permutation, float conversion) is pinned
/// here, so identical seeds give identical draw sequences on every platform.
/// The `stream` parameter selects statistically independent sequences from one
/// master seed, which is how the two network channels, the GA and the
/// evaluation-seed derivation stay decoupled.
class Pcg32 {
public:
    Pcg32() : Pcg32(0, 0) {}

    Pcg32(std::uint64_t seed, std::uint64_t stream) {
        inc_ = (stream << 1u) | 1u;
        state_ = 0u;
        next_u32();
        state_ += seed;
        next_u32();
    }

    std::uint32_t next_u32() {
        const std::uint64_t old = state_;
        state_ = old * 6364136223846793005ULL + inc_;
        const auto xorshifted = static_cast<std::uint32_t>(((old >> 18u) ^ old) >> 27u);
        const auto rot = static_cast<std::uint32_t>(old >> 59u);
        return (xorshifted >> rot) | (xorshifted << ((-rot) & 31u));
    }

    std::uint64_t next_u64() {
        const auto hi = static_cast<std::uint64_t>(next_u32());
        return (hi << 32u) | next_u32();
    }

    /// Uniform in [0, 1) with 53-bit resolution.
    double next_double() {
        return static_cast<double>(next_u64() >> 11u) * 0x1.0p-53;
    }

    /// Uniform integer in [0, n). Lemire-style widening multiply; the tiny
    /// modulo bias is irrelevant for selection indices.
    std::uint32_t next_below(std::uint32_t n) {
        return static_cast<std::uint32_t>(
            (static_cast<std::uint64_t>(next_u32()) * n) >> 32u);
    }

    /// Standard normal via Box-Muller, one spare cached.
    double next_gaussian() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double u1 = 1.0 - next_double(); // (0, 1], keeps log finite
        const double u2 = next_double();
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 6.283185307179586476925286766559 * u2;
        spare_ = radius * std::sin(angle);
        has_spare_ = true;
        return radius * std::cos(angle);
    }

private:
    std::uint64_t state_ = 0;
    std::uint64_t inc_ = 1;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

/// Fixed stream ids deriving every independent random sequence of a run from
/// one master seed.
namespace rng_stream {
inline constexpr std::uint64_t kSensorChannel = 1;  // sensor -> controller impairments
inline constexpr std::uint64_t kControlChannel = 2; // controller -> actuator impairments
inline constexpr std::uint64_t kGaOperators = 3;    // selection/crossover/mutation draws
inline constexpr std::uint64_t kGaEvalSeeds = 4;    // common-random-number seeds
inline constexpr std::uint64_t kFreshEvalSeeds = 5; // out-of-sample re-scoring seeds
} // namespace rng_stream

} // namespace ncs
