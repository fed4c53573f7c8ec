#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>

namespace stskotfs {

/// Deterministic random stream with counter-based substream derivation.
///
/// Every Monte Carlo work item (trial, design candidate, capacity draw)
/// owns a substream keyed on (master seed, stream ids), so results do not
/// depend on thread count or execution order. Gaussian variates are produced
/// by Box-Muller on top of the raw 64-bit stream instead of
/// std::normal_distribution, whose output is implementation-defined.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(mix(seed)) {}

    /// Collision-resistant seed for the (a, b, c) work item of a master stream.
    static std::uint64_t derive(std::uint64_t master, std::uint64_t a, std::uint64_t b = 0,
                                std::uint64_t c = 0) {
        std::uint64_t s = mix(master + 0x9e3779b97f4a7c15ULL);
        s = mix(s ^ mix(a + 0xbf58476d1ce4e5b9ULL));
        s = mix(s ^ mix(b + 0x94d049bb133111ebULL));
        s = mix(s ^ mix(c + 0xd6e8feb86659fd93ULL));
        return s;
    }

    static Rng substream(std::uint64_t master, std::uint64_t a, std::uint64_t b = 0,
                         std::uint64_t c = 0) {
        Rng r(0);
        r.engine_.seed(derive(master, a, b, c));
        return r;
    }

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform double in [0, 1) with 53-bit resolution.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform integer in [lo, hi] inclusive (rejection sampling, unbiased).
    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
        const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
        const std::uint64_t limit = std::uint64_t(-1) - std::uint64_t(-1) % span;
        std::uint64_t draw;
        do {
            draw = next_u64();
        } while (draw >= limit);
        return lo + static_cast<std::int64_t>(draw % span);
    }

    /// Standard real Gaussian, Box-Muller with a cached spare.
    double gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * M_PI * u2;
        spare_ = radius * std::sin(angle);
        have_spare_ = true;
        return radius * std::cos(angle);
    }

    /// Circularly-symmetric complex Gaussian CN(0, variance).
    std::complex<double> cgaussian(double variance) {
        const double scale = std::sqrt(variance / 2.0);
        return {scale * gaussian(), scale * gaussian()};
    }

private:
    static std::uint64_t mix(std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

} // namespace stskotfs
