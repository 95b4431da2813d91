#pragma once

#include <cstdint>

namespace pushsim {

/// SplitMix64 finaliser; bijective 64-bit mix.
inline std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

inline std::uint64_t splitmix64_next(std::uint64_t& state) {
    state += 0x9E3779B97F4A7C15ull;
    return mix64(state);
}

/// xoshiro256** (Blackman/Vigna). Satisfies UniformRandomBitGenerator, so
/// it plugs into <random> distributions.
class Xoshiro256 {
public:
    using result_type = std::uint64_t;

    Xoshiro256() : Xoshiro256(0x853C49E6748FEA9Bull) {}

    explicit Xoshiro256(std::uint64_t seed) {
        std::uint64_t sm = seed;
        for (auto& w : s_) w = splitmix64_next(sm);
        if ((s_[0] | s_[1] | s_[2] | s_[3]) == 0) s_[0] = 0x9E3779B97F4A7C15ull;
    }

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return ~result_type(0); }

    result_type operator()() { return next(); }

    std::uint64_t next() {
        const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    /// Exactly uniform integer in [0, bound), bound >= 1 (Lemire's
    /// multiply-shift with rejection; no modulo bias).
    std::uint64_t bounded(std::uint64_t bound) {
        unsigned __int128 m = static_cast<unsigned __int128>(next()) * bound;
        std::uint64_t lo = static_cast<std::uint64_t>(m);
        if (lo < bound) {
            const std::uint64_t threshold = (0 - bound) % bound;
            while (lo < threshold) {
                m = static_cast<unsigned __int128>(next()) * bound;
                lo = static_cast<std::uint64_t>(m);
            }
        }
        return static_cast<std::uint64_t>(m >> 64);
    }

    /// Uniform double strictly inside (0,1): 53-bit lattice offset by half
    /// a step, so logs of u and 1-u are always finite.
    double unit_open() {
        return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53;
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }

    std::uint64_t s_[4];
};

/// Pure map (master_seed, trial) -> independent stream. The whole
/// reproducibility contract hangs on this being order-free: ensembles give
/// identical results for any execution order or thread count.
inline Xoshiro256 trial_stream(std::uint64_t master_seed, std::uint64_t trial) {
    return Xoshiro256(mix64(master_seed + (trial + 1) * 0x9E3779B97F4A7C15ull));
}

} // namespace pushsim
