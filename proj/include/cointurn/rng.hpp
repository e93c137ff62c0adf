#pragma once

#include <cmath>
#include <cstdint>

namespace cointurn {

// SplitMix64 (Steele/Lea/Flood): a Weyl counter with a mixing finalizer.
// Platform-independent, 64-bit, cheap to seed and to split; every draw is a
// pure function of (seed, draw index), which is what makes ensemble output
// independent of worker scheduling.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Uniform on [0, 1) with 53-bit resolution.
    double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    bool bernoulli(double p) { return uniform01() < p; }

    // +1 or -1 with equal probability.
    int sign() { return (next() >> 63) ? -1 : 1; }

    // Exponential with the given rate; strictly positive.
    double exponential(double rate) {
        double u;
        do {
            u = uniform01();
        } while (u == 0.0);
        return -std::log(u) / rate;
    }

private:
    std::uint64_t state_;
};

inline std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Per-trial seed derivation: hash of (master seed, stream index). Trials are
// reproducible under any parallel schedule because each trial owns a stream.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
    return mix64(master + 0x9e3779b97f4a7c15ULL * (index + 1));
}

}  // namespace cointurn
