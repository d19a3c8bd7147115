#pragma once

#include <cstdint>
#include <random>

namespace rscma {

// splitmix64 finalizer, used to derive independent child seeds.
inline std::uint64_t mix_seed(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t stream) {
    return mix_seed(mix_seed(parent) ^ mix_seed(stream + 0x632be59bd9b4e019ULL));
}

/// Seedable, splittable generator. Every stochastic operation in the library
/// takes one of these (or a seed to build one) so campaigns replay bit-for-bit.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : seed_(seed), engine_(mix_seed(seed)) {}

    std::uint64_t seed() const noexcept { return seed_; }

    /// Child generator for a named sub-stream; independent of draws already
    /// taken from this one.
    Rng split(std::uint64_t stream) const { return Rng(derive_seed(seed_, stream)); }

    /// Uniform on [0, 1), like MATLAB's rand.
    double rand() { return std::uniform_real_distribution<double>(0.0, 1.0)(engine_); }

    /// Uniform integer on [lo, hi], like MATLAB's randi([lo,hi]).
    std::int64_t randi(std::int64_t lo, std::int64_t hi) {
        return std::uniform_int_distribution<std::int64_t>(lo, hi)(engine_);
    }

    double randn() { return std::normal_distribution<double>(0.0, 1.0)(engine_); }

    std::mt19937_64& engine() noexcept { return engine_; }

private:
    std::uint64_t seed_;
    std::mt19937_64 engine_;
};

}  // namespace rscma
