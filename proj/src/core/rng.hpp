#pragma once

#include <cmath>
#include <cstdint>

#include "common.hpp"

namespace sns {

// Philox2x64-10 counter-based generator (Salmon et al., SC 2011).
// A draw is a pure function of (key, counter), so samples are identical
// no matter which worker asks for them or in what order.
namespace philox {

struct Block {
    uint64_t w0, w1;
};

inline void mulhilo(uint64_t a, uint64_t b, uint64_t& hi, uint64_t& lo) {
    unsigned __int128 p = static_cast<unsigned __int128>(a) * b;
    hi = static_cast<uint64_t>(p >> 64);
    lo = static_cast<uint64_t>(p);
}

inline Block generate(uint64_t key, uint64_t ctr_hi, uint64_t ctr_lo) {
    constexpr uint64_t kMul = 0xD2B74407B1CE6E93ull;
    constexpr uint64_t kWeyl = 0x9E3779B97F4A7C15ull;
    uint64_t c0 = ctr_lo, c1 = ctr_hi, k = key;
    for (int round = 0; round < 10; ++round) {
        uint64_t hi, lo;
        mulhilo(kMul, c0, hi, lo);
        c0 = hi ^ k ^ c1;
        c1 = lo;
        k += kWeyl;
    }
    return {c0, c1};
}

inline double to_unit(uint64_t w) {
    // 53-bit mantissa in [0,1)
    return static_cast<double>(w >> 11) * 0x1.0p-53;
}

} // namespace philox

// One standard Gaussian per (seed, stream, level, index), via Box-Muller.
inline double gaussian_draw(uint64_t seed, uint32_t stream, uint32_t level, uint64_t index) {
    uint64_t hi = (static_cast<uint64_t>(stream) << 32) | level;
    philox::Block b = philox::generate(seed, hi, index);
    double u1 = philox::to_unit(b.w0);
    double u2 = philox::to_unit(b.w1);
    double r = std::sqrt(-2.0 * std::log1p(-u1)); // 1-u1 in (0,1]
    return r * std::cos(2.0 * kPi * u2);
}

// Derived sub-seed, e.g. one per Monte Carlo path.
inline uint64_t derive_seed(uint64_t master, uint64_t index) {
    return philox::generate(master, 0x5eedull, index).w0;
}

} // namespace sns
