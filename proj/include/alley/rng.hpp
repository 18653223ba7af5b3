#pragma once

#include <cstdint>

namespace alley {

// SplitMix64. Chosen over std::mt19937_64 + std::*_distribution because the
// standard distributions are not bit-reproducible across library
// implementations, and episode results must be byte-identical everywhere.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1) with 53 bits of mantissa.
    double uniform01() { return (next_u64() >> 11) * 0x1.0p-53; }

    // Uniform integer in [0, n). Unbiased via rejection.
    std::uint64_t uniform_int(std::uint64_t n) {
        if (n == 0) return 0;
        std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
        std::uint64_t x;
        do {
            x = next_u64();
        } while (x >= limit);
        return x % n;
    }

    bool bernoulli(double p) { return uniform01() < p; }

    // Deterministic child stream derivation: mixes the tags through the
    // generator so (seed, a, b) -> stream is stable across platforms.
    static Rng derive(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0) {
        Rng r(seed);
        std::uint64_t s = r.next_u64();
        s ^= 0x9E3779B97F4A7C15ULL * (a + 1);
        Rng r2(s);
        std::uint64_t s2 = r2.next_u64() ^ (0xC2B2AE3D27D4EB4FULL * (b + 1));
        return Rng(s2);
    }

private:
    std::uint64_t state_;
};

}  // namespace alley
