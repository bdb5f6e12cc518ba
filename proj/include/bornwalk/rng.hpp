#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "bornwalk/types.hpp"

namespace bornwalk {

// SplitMix64; used only to derive stream seeds.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// Seed for worker stream `index` of run seed `seed`. This mapping is part of
// the documented output-reproducibility interface: results depend only on
// (seed, stream index), never on thread scheduling.
inline std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t s = seed;
    std::uint64_t a = splitmix64(s);
    s = a ^ (index * 0xD1B54A32D192ED03ULL + 0x8CB92BA72F3D8DD7ULL);
    return splitmix64(s);
}

// mt19937_64 with hand-rolled uniform/normal transforms so that streams are
// bit-identical across standard libraries (std::*_distribution is not
// portable).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    static Rng stream(std::uint64_t seed, std::uint64_t index) {
        return Rng(stream_seed(seed, index));
    }

    // uniform in [0, 1) with 53 random bits
    double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // standard normal, polar Box-Muller (second deviate cached)
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do {
            u = 2.0 * uniform() - 1.0;
            v = 2.0 * uniform() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double m = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * m;
        has_spare_ = true;
        return u * m;
    }

    Complex complex_normal() {
        const double re = normal();
        const double im = normal();
        return {re, im};
    }

    // uniform over the closed unit disk of the complex plane
    Complex unit_disk() {
        const double r = std::sqrt(uniform());
        const double phi = uniform(0.0, kTwoPi);
        return std::polar(r, phi);
    }

    double phase() { return uniform(0.0, kTwoPi); }

    std::uint64_t raw() { return gen_(); }

private:
    std::mt19937_64 gen_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

} // namespace bornwalk
