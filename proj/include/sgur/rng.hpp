#ifndef SGUR_RNG_HPP
#define SGUR_RNG_HPP

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <utility>

#include "sgur/matrix.hpp"

namespace sgur {

// mt19937_64 output is pinned by the standard, so seeded streams reproduce
// across toolchains. The mappings below are ours for the same reason: the
// standard distributions are implementation-defined.

// [0, 1) from the top 53 bits.
inline double uniform01(std::mt19937_64& gen) {
    return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

// Unbiased integer in [0, n). Rejection on the short leading range.
inline std::uint64_t uniform_index(std::mt19937_64& gen, std::uint64_t n) {
    const std::uint64_t threshold = (0 - n) % n;  // 2^64 mod n
    for (;;) {
        std::uint64_t r = gen();
        if (r >= threshold) return r % n;
    }
}

// Box-Muller pair of standard normals. u1 is drawn from (0, 1] so the log
// stays finite.
inline std::pair<double, double> gaussian_pair(std::mt19937_64& gen) {
    double u1 = (static_cast<double>(gen() >> 11) + 1.0) * 0x1.0p-53;
    double u2 = uniform01(gen);
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 2.0 * std::numbers::pi * u2;
    return {r * std::cos(a), r * std::sin(a)};
}

template <typename T>
void fill_gaussian(BasicMatrix<T>& m, std::mt19937_64& gen, double stddev) {
    std::size_t n = m.data.size();
    for (std::size_t i = 0; i + 1 < n; i += 2) {
        auto [z0, z1] = gaussian_pair(gen);
        m.data[i] = static_cast<T>(z0 * stddev);
        m.data[i + 1] = static_cast<T>(z1 * stddev);
    }
    if (n % 2 == 1) {
        auto [z0, z1] = gaussian_pair(gen);
        (void)z1;
        m.data[n - 1] = static_cast<T>(z0 * stddev);
    }
}

// Fisher-Yates using the unbiased index draw.
template <typename Vec>
void shuffle_indices(Vec& v, std::mt19937_64& gen) {
    for (std::size_t i = v.size(); i > 1; --i) {
        std::size_t j = static_cast<std::size_t>(uniform_index(gen, i));
        std::swap(v[i - 1], v[j]);
    }
}

}

#endif
