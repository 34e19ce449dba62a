// SPDX-License-Identifier: MIT
#pragma once

#include <bit>
#include <cstdint>

namespace cmf {

namespace detail {

// splitmix64 finalizer; statistically solid bit mixing for Monte Carlo use.
inline std::uint64_t mix64(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ull;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBull;
    z ^= z >> 31;
    return z;
}

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

}  // namespace detail

// Deterministic uniform stream for one Monte Carlo replicate.  Every draw is
// a pure function of (seed, replicate, key), so values do not depend on
// evaluation order, thread count, or how many draws other replicates made.
class ReplicateStream {
public:
    ReplicateStream(std::uint64_t seed, std::uint64_t replicate)
        : base_(detail::mix64(seed + detail::kGolden * detail::mix64(replicate + 1))) {}

    // Uniform on the open unit interval, clamped to [2^-53, 1 - 2^-53].
    double uniform(std::uint64_t key) {
        ++draws_;
        std::uint64_t r = detail::mix64(base_ ^ detail::mix64(key * detail::kGolden + 0xD1B54A32D192ED03ull));
        double u = double(r >> 11) * 0x1.0p-53;
        if (u < 0x1.0p-53) u = 0x1.0p-53;
        if (u > 1.0 - 0x1.0p-53) u = 1.0 - 0x1.0p-53;
        return u;
    }

    std::uint64_t draws() const { return draws_; }

private:
    std::uint64_t base_;
    std::uint64_t draws_ = 0;
};

// Key for the uniform driving the composed step that starts at time
// step_index * 2^-level.  The position is reduced as a dyadic rational, so a
// level-(m+1) iterate reuses the level-m draw on the first half of each
// coarse step: successive levels are coupled by common random numbers while
// steps within one level stay independent.
inline std::uint64_t step_position_key(std::uint64_t step_index, int level) {
    std::uint64_t q = 0;
    int d = 0;
    if (step_index != 0) {
        int tz = std::countr_zero(step_index);
        if (tz > level) tz = level;
        q = step_index >> tz;
        d = level - tz;
    }
    return ((q << 6) | std::uint64_t(d)) + 1;
}

// Key space for per-coordinate draws (independent product coupling).
inline std::uint64_t coordinate_key(int i) {
    return (std::uint64_t(1) << 62) + std::uint64_t(i);
}

}  // namespace cmf
