#ifndef MUBSA_RNG_HPP
#define MUBSA_RNG_HPP

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>

namespace mubsa {

/// Seeded random source with independent substreams.
///
/// A (seed, stream) pair fully determines the draw sequence, so Monte Carlo
/// sweeps that hand one substream per trial block produce identical results
/// regardless of how the blocks are scheduled. Distribution sampling is
/// implemented here rather than with std:: distributions, whose sequences
/// are not pinned by the standard.
class RandomSource {
public:
    explicit RandomSource(std::uint64_t seed, std::uint64_t stream = 0)
        : seed_(seed), stream_(stream) {
        std::uint64_t s = seed ^ mix(stream ^ 0x9e3779b97f4a7c15ull);
        engine_.seed(mix(s));
    }

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream() const { return stream_; }

    /// Derived source, independent of this one for practical purposes.
    RandomSource substream(std::uint64_t id) const {
        return RandomSource(seed_, mix(stream_ + 0x632be59bd9b4e019ull) + id);
    }

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform on [0, 1) with 53 random bits.
    double uniform01() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    double uniform(double a, double b) { return a + uniform01() * (b - a); }

    /// Fair sign, +1 or -1.
    double rademacher() { return (engine_() & 1u) ? 1.0 : -1.0; }

    bool bernoulli(double p) { return uniform01() < p; }

    /// Standard normal via Box-Muller; caches the paired draw.
    double gaussian() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = uniform01();
        while (u1 <= 0.0) u1 = uniform01();
        const double u2 = uniform01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * kPi * u2;
        spare_ = r * std::sin(a);
        has_spare_ = true;
        return r * std::cos(a);
    }

    /// Circularly symmetric complex normal with E|z|^2 = power.
    std::complex<double> circular_gaussian(double power) {
        const double s = std::sqrt(power / 2.0);
        return {s * gaussian(), s * gaussian()};
    }

    /// Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n) {
        // Lemire-style rejection; n is small in all uses here.
        const std::uint64_t threshold = (0 - n) % n;
        for (;;) {
            const std::uint64_t r = engine_();
            if (r >= threshold) return r % n;
        }
    }

private:
    static constexpr double kPi = 3.14159265358979323846;

    static std::uint64_t mix(std::uint64_t z) {
        // splitmix64 finalizer
        z += 0x9e3779b97f4a7c15ull;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    std::uint64_t seed_;
    std::uint64_t stream_;
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

} // namespace mubsa

#endif // MUBSA_RNG_HPP
