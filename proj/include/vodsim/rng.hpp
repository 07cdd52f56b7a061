#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>

namespace vodsim {

/// splitmix64 finalizer; used to derive independent sub-seeds.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t derive_subseed(std::uint64_t seed, std::size_t index) {
    return splitmix64(seed + 0x9e3779b97f4a7c15ULL * (index + 1));
}

/// Deterministic generator for the simulator and the Monte Carlo oracle.
/// All draws consume exactly one engine output, so the draw sequence is a
/// pure function of the seed.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t raw() { return engine_(); }

    /// Uniform double in [0, 1).
    double uniform01() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    double exponential(double mean) {
        if (mean <= 0.0) {
            throw std::invalid_argument("Rng::exponential: mean must be positive");
        }
        return -mean * std::log1p(-uniform01());
    }

    /// Inverse-CDF draw over a probability vector; returns a 0-based index.
    int categorical(std::span<const double> probs) {
        if (probs.empty()) {
            throw std::invalid_argument("Rng::categorical: empty probability vector");
        }
        const double u = uniform01();
        double acc = 0.0;
        int last_positive = 0;
        for (std::size_t i = 0; i < probs.size(); ++i) {
            if (probs[i] > 0.0) {
                last_positive = static_cast<int>(i);
            }
            acc += probs[i];
            if (u < acc) {
                return static_cast<int>(i);
            }
        }
        // Rounding left acc marginally below 1; fall back to the last
        // positive-probability outcome.
        return last_positive;
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace vodsim
