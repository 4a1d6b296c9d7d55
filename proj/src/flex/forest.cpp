#include <algorithm>
#include <boost/math/distributions/normal.hpp>
#include <cmath>

#include "itr/core/error.hpp"
#include "itr/flex/bart.hpp"

namespace itr {

double normal_cdf(double x) noexcept { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) throw ParameterError("normal quantile needs p in (0, 1)");
    return boost::math::quantile(boost::math::normal_distribution<double>(), p);
}

ProbitForest::ProbitForest(std::vector<std::vector<double>> cut_values, double offset,
                           std::vector<ForestDraw> draws)
    : cuts_(std::move(cut_values)), offset_(offset), draws_(std::move(draws)) {
    for (const auto& d : draws_)
        for (const auto& nd : d.nodes) {
            if (nd.var < 0) continue;
            const auto v = static_cast<std::size_t>(nd.var);
            if (v >= cuts_.size() || nd.cut < 0 || static_cast<std::size_t>(nd.cut) >= cuts_[v].size() ||
                nd.left < 0 || nd.right < 0 || static_cast<std::size_t>(nd.left) >= d.nodes.size() ||
                static_cast<std::size_t>(nd.right) >= d.nodes.size())
                throw ParameterError("malformed forest node");
        }
}

double ProbitForest::latent(std::size_t draw, std::span<const double> u) const {
    if (u.size() != cuts_.size())
        throw PredictionError("forest expects " + std::to_string(cuts_.size()) + " inputs, got " +
                              std::to_string(u.size()));
    const ForestDraw& d = draws_[draw];
    double g = 0.0;
    for (auto root : d.roots) {
        std::size_t k = root;
        while (d.nodes[k].var >= 0) {
            const FlatNode& nd = d.nodes[k];
            const auto v = static_cast<std::size_t>(nd.var);
            k = static_cast<std::size_t>(u[v] <= cuts_[v][static_cast<std::size_t>(nd.cut)] ? nd.left
                                                                                           : nd.right);
        }
        g += d.nodes[k].mu;
    }
    return offset_ + g;
}

double ProbitForest::probability(std::size_t draw, std::span<const double> u) const {
    return std::clamp(normal_cdf(latent(draw, u)), 1e-12, 1.0 - 1e-12);
}

std::vector<double> ProbitForest::mean_probability(const Matrix& u) const {
    std::vector<double> out(u.rows(), 0.0);
    for (std::size_t d = 0; d < draws_.size(); ++d)
        for (std::size_t i = 0; i < u.rows(); ++i) out[i] += probability(d, u.row(i));
    for (double& v : out) v /= static_cast<double>(draws_.size());
    return out;
}

}  // namespace itr
