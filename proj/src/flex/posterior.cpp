#include "itr/flex/posterior.hpp"

#include "itr/core/error.hpp"

namespace itr {

std::vector<double> PosteriorDraws::mean(int t) const {
    std::vector<double> m(n_, 0.0);
    for (std::size_t d = 0; d < d_; ++d) {
        const auto a = arm(d, t);
        for (std::size_t i = 0; i < n_; ++i) m[i] += a[i];
    }
    for (double& v : m) v /= static_cast<double>(d_);
    return m;
}

std::vector<double> PosteriorDraws::mean_tau() const {
    std::vector<double> m(n_, 0.0);
    for (std::size_t d = 0; d < d_; ++d) {
        const auto a1 = arm(d, 1), a0 = arm(d, 0);
        for (std::size_t i = 0; i < n_; ++i) m[i] += a1[i] - a0[i];
    }
    for (double& v : m) v /= static_cast<double>(d_);
    return m;
}

void PosteriorDraws::validate() const {
    if (d_ == 0) throw ParameterError("posterior has no draws");
    for (std::size_t k = 0; k < v_.size(); ++k)
        if (!(v_[k] > 0.0 && v_[k] < 1.0))
            throw ParameterError("posterior probability outside (0, 1) at draw " +
                                 std::to_string(k / (2 * n_)));
}

PosteriorDraws PosteriorDraws::point(std::span<const double> p1, std::span<const double> p0) {
    if (p1.size() != p0.size()) throw ParameterError("arm vectors differ in length");
    PosteriorDraws out(1, p1.size());
    for (std::size_t i = 0; i < p1.size(); ++i) {
        out.at(0, i, 1) = p1[i];
        out.at(0, i, 0) = p0[i];
    }
    return out;
}

}  // namespace itr
