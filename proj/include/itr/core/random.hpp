#pragma once

#include <cstddef>
#include <cstdint>
#include <random>

namespace itr {

// SplitMix64 finalizer; a bijection on 64-bit words.
std::uint64_t mix64(std::uint64_t x) noexcept;

// Seed of a named sub-stream: mix64(parent ^ mix64(stream)). Distinct stream
// tags give statistically independent generators from one parent seed.
std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t stream) noexcept;

// Per-replicate seed: master XOR replicate index.
constexpr std::uint64_t replicate_seed(std::uint64_t master, std::uint64_t replicate) noexcept {
    return master ^ replicate;
}

// Stream tags used throughout the library.
namespace stream {
inline constexpr std::uint64_t covariates = 1;
inline constexpr std::uint64_t treatment = 2;
inline constexpr std::uint64_t outcome = 3;
inline constexpr std::uint64_t sample = 4;
inline constexpr std::uint64_t outcome_model = 5;
inline constexpr std::uint64_t propensity_model = 6;
inline constexpr std::uint64_t sgd = 7;
inline constexpr std::uint64_t population = 8;
}  // namespace stream

// Mersenne Twister (64-bit) with transforms written out here instead of the
// implementation-defined std:: distributions, so draws are identical across
// standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(mix64(seed)) {}

    // Uniform on [0, 1) with 53 random bits.
    double uniform() noexcept { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    // Uniform on (0, 1).
    double uniform_open() noexcept {
        double u;
        do u = uniform();
        while (u == 0.0);
        return u;
    }
    bool bernoulli(double p) noexcept { return uniform() < p; }
    // Uniform integer on [0, n), unbiased.
    std::size_t index(std::size_t n) noexcept;
    // Standard normal (Marsaglia polar method).
    double normal() noexcept;
    // Standard normal conditioned on exceeding `lower`.
    double normal_above(double lower) noexcept;

    // Fisher-Yates shuffle.
    template <class It>
    void shuffle(It first, It last) noexcept {
        const auto n = static_cast<std::size_t>(last - first);
        for (std::size_t i = n; i > 1; --i) std::swap(first[i - 1], first[index(i)]);
    }

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace itr
