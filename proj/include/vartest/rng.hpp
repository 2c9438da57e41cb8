#ifndef VARTEST_RNG_HPP
#define VARTEST_RNG_HPP

#include <cmath>
#include <cstdint>
#include <vector>

namespace vartest {

// Splitmix64 PRNG. Small, fast, and with a closed-form jump: every draw
// depends only on (state, index), so per-point substreams derived with
// derive() are reproducible under any thread count.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1).
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Standard normal via Box-Muller (no cached spare: keeps the state
    // a pure function of the draw count).
    double normal() {
        double u1 = uniform();
        double u2 = uniform();
        if (u1 < 1e-300) u1 = 1e-300;
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586477 * u2);
    }

    // Deterministic substream: mixes the base seed with a stream index.
    static std::uint64_t derive(std::uint64_t seed, std::uint64_t stream) {
        std::uint64_t z = seed ^ (0x9e3779b97f4a7c15ULL + stream * 0xbf58476d1ce4e5b9ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

private:
    std::uint64_t state_;
};

// Radical-inverse (van der Corput) in the given base.
inline double radical_inverse(std::uint64_t i, std::uint64_t base) {
    double inv = 1.0 / static_cast<double>(base);
    double f = inv;
    double x = 0.0;
    while (i > 0) {
        x += static_cast<double>(i % base) * f;
        i /= base;
        f *= inv;
    }
    return x;
}

// Halton sequence point in [0,1)^dim; index 0 maps to the origin, so
// callers usually start at index 1.
std::vector<double> halton_point(std::uint64_t index, int dim);

// Inverse standard-normal CDF (Acklam's approximation, ~1e-9 relative).
double inverse_normal_cdf(double p);

}  // namespace vartest

#endif
