#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string_view>
#include <vector>

namespace sybil {

/// splitmix64 finalizer; the mixing step behind all seed derivation.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

/// Derives a child seed from a master seed, a stage tag, and an index.
/// Every randomized step in the harness draws its seed through this one
/// function, so any cell of an experiment can be re-run in isolation:
///   seed = splitmix64(splitmix64(master ^ fnv1a64(stage)) ^ index)
inline std::uint64_t derive_seed(std::uint64_t master, std::string_view stage,
                                 std::uint64_t index = 0) {
    return splitmix64(splitmix64(master ^ fnv1a64(stage)) ^ index);
}

/// mt19937_64 wrapper with portable draw helpers. The engine's output
/// sequence is fixed by the standard; the distributions here are written
/// out explicitly so results do not depend on the standard library's
/// distribution internals.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform integer in [0, bound). Rejection sampling, no modulo bias.
    std::uint64_t below(std::uint64_t bound) {
        if (bound == 0) throw std::invalid_argument("Rng::below: bound must be positive");
        const std::uint64_t limit = std::uint64_t(-1) - std::uint64_t(-1) % bound;
        std::uint64_t x;
        do {
            x = engine_();
        } while (x >= limit);
        return x % bound;
    }

    /// Uniform double in [0, 1) with 53 random bits.
    double unit() { return double(engine_() >> 11) * 0x1.0p-53; }

    /// True with probability p.
    bool bernoulli(double p) { return unit() < p; }

private:
    std::mt19937_64 engine_;
};

/// First k elements of a seeded random permutation of `pool` (partial
/// Fisher-Yates). Consumes the pool by value; order of the remainder is
/// unspecified.
template <typename T>
std::vector<T> sample_without_replacement(std::vector<T> pool, std::size_t k, Rng& rng) {
    if (k > pool.size())
        throw std::invalid_argument("sample_without_replacement: k exceeds pool size");
    for (std::size_t i = 0; i < k; ++i) {
        const std::size_t j = i + std::size_t(rng.below(pool.size() - i));
        std::swap(pool[i], pool[j]);
    }
    pool.resize(k);
    return pool;
}

}  // namespace sybil
