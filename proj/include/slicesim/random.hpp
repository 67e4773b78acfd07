#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace slicesim {

// Finalizer of splitmix64; good 64-bit mixing for seed derivation.
inline std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

// Derives a decorrelated child seed; distinct salts give independent streams.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t salt) {
    return mix64(base + 0x9E3779B97F4A7C15ull * (2 * salt + 1));
}

// Deterministic random stream with explicit, portable transforms. The
// distribution algorithms live here (not in <random>'s distribution classes)
// so that results are bit-identical across standard libraries.
class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed) : eng_(mix64(seed ^ 0x6A09E667F3BCC909ull)) {}

    std::uint64_t raw() { return eng_(); }

    // Uniform on the open interval (0,1), 53-bit resolution; never 0 or 1,
    // so logs of it and of its complement are finite.
    double uniform01() {
        return (static_cast<double>(eng_() >> 11) + 0.5) * (1.0 / 9007199254740992.0);
    }

    double uniform(double a, double b) { return a + (b - a) * uniform01(); }

    // Uniform integer in [0, n); n must be >= 1.
    int uniform_int(int n) {
        int k = static_cast<int>(uniform01() * n);
        return k < n ? k : n - 1;
    }

    // Box-Muller with one cached variate.
    double normal(double mean, double sd) {
        if (has_spare_) {
            has_spare_ = false;
            return mean + sd * spare_;
        }
        double r = std::sqrt(-2.0 * std::log(uniform01()));
        double a = 2.0 * std::numbers::pi * uniform01();
        spare_ = r * std::sin(a);
        has_spare_ = true;
        return mean + sd * r * std::cos(a);
    }

    // Gumbel with scale nu and location -euler_gamma*nu, hence zero mean.
    double gumbel_zero_mean(double nu) {
        return -std::numbers::egamma * nu - nu * std::log(-std::log(uniform01()));
    }

private:
    std::mt19937_64 eng_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace slicesim
