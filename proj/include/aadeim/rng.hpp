#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace aadeim {

// SplitMix64 (Steele, Lea, Flood 2014). Chosen over std::mt19937_64 because
// the standard does not pin down the distributions, and every draw here must
// be reproducible bit-for-bit from the seed, including by ports to other
// languages. All randomness in a run flows through one instance of this.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1), 53 mantissa bits.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform in {0, ..., n-1} via modulo; the bias is < n / 2^64.
    std::uint64_t bounded(std::uint64_t n) { return next_u64() % n; }

    // Standard normal via Box-Muller on two fresh uniforms. The cosine partner
    // is cached so consecutive calls consume uniforms in a fixed pattern.
    double gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        double u2 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * std::numbers::pi * u2;
        spare_ = radius * std::sin(angle);
        have_spare_ = true;
        return radius * std::cos(angle);
    }

private:
    std::uint64_t state_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

} // namespace aadeim
