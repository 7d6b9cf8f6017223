#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>

namespace pdo {

/// Counter-based splittable generator.
///
/// Output i (1-based) of a stream with key K is fin(K + i * G), where G is the
/// 64-bit golden ratio constant and fin is the SplitMix64 output finalizer.
/// A stream seeded with s has K = fin(s + G); split(t) derives the child key
/// fin(K xor fin((t + 1) * G)). Uniform doubles take the top 53 bits; normals
/// use one Box-Muller pair per draw (cosine branch only). The README spells
/// this out so other implementations reproduce the same test functions.
class Rng {
public:
    static constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

    explicit Rng(std::uint64_t seed) : key_(finalize(seed + kGolden)) {}

    static constexpr std::uint64_t finalize(std::uint64_t z) noexcept {
        z ^= z >> 30;
        z *= 0xBF58476D1CE4E5B9ULL;
        z ^= z >> 27;
        z *= 0x94D049BB133111EBULL;
        z ^= z >> 31;
        return z;
    }

    std::uint64_t next_u64() noexcept {
        ++counter_;
        return finalize(key_ + counter_ * kGolden);
    }

    Rng split(std::uint64_t stream) const noexcept {
        Rng child(0);
        child.key_ = finalize(key_ ^ finalize((stream + 1) * kGolden));
        child.counter_ = 0;
        return child;
    }

    /// Uniform on [0, 1).
    double uniform() noexcept { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }

    double normal() noexcept {
        const double u1 = 1.0 - uniform();  // (0, 1]
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

    std::complex<double> complex_normal() noexcept {
        const double re = normal();
        const double im = normal();
        return {re * std::numbers::sqrt2 / 2.0, im * std::numbers::sqrt2 / 2.0};
    }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

}  // namespace pdo
