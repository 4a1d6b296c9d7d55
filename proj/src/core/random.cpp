#include "itr/core/random.hpp"

#include <cmath>
#include <limits>

namespace itr {

std::uint64_t mix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t stream) noexcept {
    return mix64(parent ^ mix64(stream));
}

std::size_t Rng::index(std::size_t n) noexcept {
    if (n <= 1) return 0;
    const std::uint64_t bound = static_cast<std::uint64_t>(n);
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % bound;
    std::uint64_t r;
    do r = engine_();
    while (r >= limit);
    return static_cast<std::size_t>(r % bound);
}

double Rng::normal() noexcept {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    double u, v, s;
    do {
        u = 2.0 * uniform() - 1.0;
        v = 2.0 * uniform() - 1.0;
        s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double f = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * f;
    has_spare_ = true;
    return u * f;
}

double Rng::normal_above(double lower) noexcept {
    if (lower <= 0.45) {
        // Plain rejection accepts with probability >= 1 - Phi(0.45) ~ 0.33.
        for (;;) {
            const double z = normal();
            if (z > lower) return z;
        }
    }
    // Robert (1995): translated exponential proposal with the optimal rate.
    const double rate = 0.5 * (lower + std::sqrt(lower * lower + 4.0));
    for (;;) {
        const double z = lower - std::log(uniform_open()) / rate;
        const double d = z - rate;
        if (uniform() <= std::exp(-0.5 * d * d)) return z;
    }
}

}  // namespace itr
