#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

namespace emml {

// 64-bit finalizer (splitmix64). Used for seed mixing and stream derivation.
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

// Deterministic sub-stream seed: stream_i = hash(seed, i). Independent of
// scheduling order, so parallel consumers stay reproducible.
inline std::uint64_t derive_stream(std::uint64_t seed, std::uint64_t index) {
    return mix64(mix64(seed) ^ (0x9e3779b97f4a7c15ull + mix64(index)));
}

// PCG-XSH-RR 32-bit generator. Hand-rolled so sequences are identical across
// platforms and standard libraries.
class Pcg32 {
public:
    explicit Pcg32(std::uint64_t seed) {
        state_ = 0;
        next_u32();
        state_ += mix64(seed);
        next_u32();
    }

    std::uint32_t next_u32() {
        std::uint64_t old = state_;
        state_ = old * 6364136223846793005ull + 1442695040888963407ull;
        std::uint32_t xorshifted = static_cast<std::uint32_t>(((old >> 18u) ^ old) >> 27u);
        std::uint32_t rot = static_cast<std::uint32_t>(old >> 59u);
        return (xorshifted >> rot) | (xorshifted << ((32u - rot) & 31u));
    }

    // Unbiased draw in [0, bound) via rejection.
    std::uint32_t bounded(std::uint32_t bound) {
        if (bound <= 1) return 0;
        std::uint32_t threshold = (0u - bound) % bound;
        for (;;) {
            std::uint32_t r = next_u32();
            if (r >= threshold) return r % bound;
        }
    }

    // Uniform in [0, 1) with 53 random bits.
    double next_double() {
        std::uint64_t hi = next_u32();
        std::uint64_t lo = next_u32();
        std::uint64_t bits = ((hi << 32) | lo) >> 11;
        return static_cast<double>(bits) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

    // Box-Muller with cached spare draw.
    double next_normal(double mean = 0.0, double stddev = 1.0) {
        if (has_spare_) {
            has_spare_ = false;
            return mean + stddev * spare_;
        }
        double u1 = 0.0;
        do {
            u1 = next_double();
        } while (u1 <= 0.0);
        double u2 = next_double();
        double r = std::sqrt(-2.0 * std::log(u1));
        double theta = 2.0 * 3.14159265358979323846 * u2;
        spare_ = r * std::sin(theta);
        has_spare_ = true;
        return mean + stddev * r * std::cos(theta);
    }

private:
    std::uint64_t state_ = 0;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

// Seeded Fisher-Yates. std::shuffle is implementation-defined, this is not.
template <class T>
void fisher_yates_shuffle(std::vector<T>& v, Pcg32& rng) {
    if (v.size() < 2) return;
    for (std::size_t i = v.size() - 1; i > 0; --i) {
        std::size_t j = rng.bounded(static_cast<std::uint32_t>(i + 1));
        std::swap(v[i], v[j]);
    }
}

} // namespace emml
