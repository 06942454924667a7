#pragma once

#include <cstdint>
#include <cmath>
#include <vector>

namespace dagwish {

/// splitmix64-based counter generator. Hand-rolled so that streams are
/// reproducible byte-for-byte across standard libraries and platforms;
/// std::normal_distribution et al. are implementation-defined.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    /// Derives an independent stream, used to give parallel tasks (permutation
    /// k, repetition r) private generators with scheduling-free results.
    static Rng stream(std::uint64_t seed, std::uint64_t k) {
        Rng r(seed ^ (0x9e3779b97f4a7c15ULL * (k + 1)));
        r.next();
        return r;
    }

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform on [0, 1) with 53-bit resolution.
    double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    /// Uniform integer in [0, n).
    int below(int n) {
        // Rejection sampling keeps the draw exactly uniform.
        std::uint64_t bound = UINT64_MAX - UINT64_MAX % static_cast<std::uint64_t>(n);
        std::uint64_t x;
        do {
            x = next();
        } while (x >= bound);
        return static_cast<int>(x % static_cast<std::uint64_t>(n));
    }

    /// Standard normal via Box-Muller.
    double normal() {
        double u1 = uniform01();
        double u2 = uniform01();
        while (u1 == 0.0) u1 = uniform01();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586477 * u2);
    }

    /// Fisher-Yates shuffle producing a uniform permutation of {0,...,p-1}.
    std::vector<int> permutation(int p) {
        std::vector<int> sigma(static_cast<std::size_t>(p));
        for (int i = 0; i < p; ++i) sigma[static_cast<std::size_t>(i)] = i;
        for (int i = p - 1; i > 0; --i) {
            int j = below(i + 1);
            std::swap(sigma[static_cast<std::size_t>(i)], sigma[static_cast<std::size_t>(j)]);
        }
        return sigma;
    }

private:
    std::uint64_t state_;
};

}  // namespace dagwish
