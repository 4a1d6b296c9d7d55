#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace itr {

// D posterior draws of f(x_i, t) for n individuals and t in {0, 1}.
// Stored arm-major per draw so each (draw, arm) slice is contiguous.
class PosteriorDraws {
public:
    PosteriorDraws() = default;
    PosteriorDraws(std::size_t draws, std::size_t n) : d_(draws), n_(n), v_(draws * 2 * n, 0.5) {}

    std::size_t draws() const noexcept { return d_; }
    std::size_t n() const noexcept { return n_; }

    double at(std::size_t d, std::size_t i, int t) const { return v_[(d * 2 + t) * n_ + i]; }
    double& at(std::size_t d, std::size_t i, int t) { return v_[(d * 2 + t) * n_ + i]; }

    std::span<const double> arm(std::size_t d, int t) const {
        return {v_.data() + (d * 2 + t) * n_, n_};
    }
    std::span<double> arm(std::size_t d, int t) { return {v_.data() + (d * 2 + t) * n_, n_}; }

    // Posterior mean of f(x_i, t).
    std::vector<double> mean(int t) const;
    // Posterior mean of f(x_i, 1) - f(x_i, 0).
    std::vector<double> mean_tau() const;

    // Throws ParameterError unless every entry lies strictly inside (0, 1).
    void validate() const;

    // Single-draw container from point estimates.
    static PosteriorDraws point(std::span<const double> p1, std::span<const double> p0);

    friend bool operator==(const PosteriorDraws&, const PosteriorDraws&) = default;

private:
    std::size_t d_ = 0;
    std::size_t n_ = 0;
    std::vector<double> v_;
};

}  // namespace itr
