#pragma once

#include <cstdint>
#include <complex>
#include <random>

namespace nharq {

// Deterministic per-trial random stream. Two RngStreams with distinct
// (seed, stream_id) pairs are statistically independent; the same pair
// always reproduces the same draw sequence regardless of what other
// streams exist or in which order trials run.
class RngStream {
public:
    RngStream(std::uint64_t seed, std::uint64_t stream_id)
        : engine_(mix(seed, stream_id)) {}

    std::uint64_t seed_word() { return engine_(); }

    // Uniform in [0, 1).
    double uniform() {
        return (engine_() >> 11) * 0x1.0p-53;
    }

    // Standard normal via Box-Muller (pinned algorithm so sequences are
    // bit-identical across standard library implementations).
    double gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        double u2 = uniform();
        while (u1 <= 0.0) {
            u1 = uniform();
        }
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(theta);
        have_spare_ = true;
        return r * std::cos(theta);
    }

    // Circularly-symmetric complex Gaussian with E[|z|^2] = variance.
    std::complex<double> complex_gaussian(double variance) {
        const double s = std::sqrt(variance * 0.5);
        const double re = gaussian();
        const double im = gaussian();
        return {s * re, s * im};
    }

private:
    static std::uint64_t splitmix64(std::uint64_t& x) {
        x += 0x9E3779B97F4A7C15ULL;
        std::uint64_t z = x;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    static std::uint64_t mix(std::uint64_t seed, std::uint64_t stream_id) {
        std::uint64_t s = seed;
        std::uint64_t a = splitmix64(s);
        s ^= stream_id * 0xDA942042E4DD58B5ULL;
        std::uint64_t b = splitmix64(s);
        return a ^ (b + 0x9E3779B97F4A7C15ULL);
    }

    std::mt19937_64 engine_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace nharq
