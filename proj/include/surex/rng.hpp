#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <stdexcept>
#include <vector>

namespace surex {

/// SplitMix64 scrambler, used to derive decorrelated child seeds.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Seeded generator with hand-rolled transforms. std:: distributions are
/// implementation-defined, so every draw here is specified bit-for-bit;
/// the same seed gives the same stream on any conforming platform.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : seed_(seed), engine_(splitmix64(seed)) {}

    std::uint64_t seed() const { return seed_; }

    /// Independent child stream; stable under the (seed, id) pair.
    Rng derive(std::uint64_t stream_id) const {
        return Rng(splitmix64(seed_ ^ (0xd1342543de82ef95ULL * (stream_id + 1))));
    }

    std::uint64_t raw() { return engine_(); }

    /// Uniform on the open interval (0, 1): 53-bit mantissa plus a half-ulp
    /// offset so 0 and 1 are never returned.
    double uniform() {
        return (static_cast<double>(raw() >> 11) + 0.5) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + uniform() * (hi - lo); }

    /// Unbiased integer in [0, n) by rejection.
    std::uint64_t uniform_int(std::uint64_t n) {
        if (n == 0) throw std::invalid_argument("Rng::uniform_int: empty range");
        const std::uint64_t limit = (~std::uint64_t{0}) - (~std::uint64_t{0}) % n;
        std::uint64_t v = raw();
        while (v >= limit) v = raw();
        return v % n;
    }

    /// Standard normal via Box-Muller; two uniforms per draw, no caching.
    double normal() {
        const double u1 = uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

    /// Fisher-Yates permutation of 0..n-1.
    std::vector<std::size_t> permutation(std::size_t n) {
        std::vector<std::size_t> p(n);
        for (std::size_t i = 0; i < n; ++i) p[i] = i;
        for (std::size_t i = n; i > 1; --i)
            std::swap(p[i - 1], p[uniform_int(i)]);
        return p;
    }

    /// Without-replacement sample of k indices from 0..n-1, in draw order.
    std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t k) {
        std::vector<std::size_t> pool(n);
        for (std::size_t i = 0; i < n; ++i) pool[i] = i;
        std::vector<std::size_t> out;
        out.reserve(k);
        for (std::size_t i = 0; i < k; ++i) {
            const std::size_t j = uniform_int(n - i);
            out.push_back(pool[j]);
            std::swap(pool[j], pool[n - i - 1]);
        }
        return out;
    }

private:
    std::uint64_t seed_;
    std::mt19937_64 engine_;
};

}  // namespace surex
