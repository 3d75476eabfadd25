#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

// Counter-based random substreams. A SubStream is a pure function of
// (seed, sample, site, slot): no draw order is shared between sites, so a
// Monte Carlo run produces bit-identical noise under any worker count and
// under any truncation of the lattice. std:: distributions are deliberately
// avoided because their output is implementation-defined; everything here is
// fixed-width integer arithmetic plus libm, reproducible for a given binary.

namespace stochnlw {

struct SubStream {
    std::uint64_t state;

    static std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    SubStream(std::uint64_t seed, std::uint64_t sample, std::uint64_t site,
              std::uint64_t slot) {
        state = seed;
        for (std::uint64_t w : {sample, site, slot})
            state = mix(state + 0x9E3779B97F4A7C15ull + w * 0x2545F4914F6CDD1Dull);
    }

    std::uint64_t next_u64() {
        state += 0x9E3779B97F4A7C15ull;
        return mix(state);
    }

    // Uniform in [0, 1), 53 random bits.
    double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Two independent N(0,1) draws (Box-Muller; log argument kept in (0,1]).
    void gaussian_pair(double& a, double& b) {
        double u1 = 1.0 - next_unit();
        double u2 = next_unit();
        double rad = std::sqrt(-2.0 * std::log(u1));
        double ang = 2.0 * std::numbers::pi * u2;
        a = rad * std::cos(ang);
        b = rad * std::sin(ang);
    }

    // Uniform on [-sqrt(3), sqrt(3)] (unit variance).
    double uniform_sym() {
        return std::numbers::sqrt3 * (2.0 * next_unit() - 1.0);
    }

    // +1 or -1 with equal probability.
    double sign() { return (next_u64() >> 63) ? 1.0 : -1.0; }
};

} // namespace stochnlw
