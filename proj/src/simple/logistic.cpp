#include "itr/simple/logistic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "itr/core/error.hpp"
#include "itr/core/random.hpp"
#include "itr/core/rule.hpp"
#include "itr/kernels/kernels.hpp"

namespace itr {

double expit(double x) noexcept {
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

double logit(double p) noexcept { return std::log(p / (1.0 - p)); }

LogisticModel::LogisticModel(std::vector<Feature> basis, std::vector<double> weights)
    : basis_(std::move(basis)), weights_(std::move(weights)) {
    if (basis_.size() != weights_.size())
        throw ParameterError("logistic basis and weight vector differ in length");
    for (double w : weights_)
        if (!std::isfinite(w)) throw ParameterError("logistic weights must be finite");
}

double LogisticModel::predict(std::span<const double> raw, double t) const {
    double eta = 0.0;
    for (std::size_t k = 0; k < basis_.size(); ++k) {
        if (basis_[k].column >= static_cast<int>(raw.size()))
            throw PredictionError("logistic model expects at least " +
                                  std::to_string(basis_[k].column + 1) + " inputs, got " +
                                  std::to_string(raw.size()));
        eta += weights_[k] * basis_[k].eval(raw, t);
    }
    return expit(eta);
}

int LogisticModel::decide(std::span<const double> raw) const { return itr::decide(predict(raw)); }

namespace {

double row_dot(std::span<const double> phi, std::span<const double> w) {
    double s = 0.0;
    for (std::size_t k = 0; k < phi.size(); ++k) s += phi[k] * w[k];
    return s;
}

void check_design(const Matrix& design, std::span<const double> labels,
                  std::span<const double> weights) {
    if (labels.size() != design.rows()) throw ParameterError("label count differs from row count");
    if (weights.size() != design.cols()) throw ParameterError("weight count differs from basis size");
    if (design.rows() == 0) throw InsufficientData("empty design matrix");
}

}  // namespace

double soft_log_likelihood(const Matrix& design, std::span<const double> labels,
                           std::span<const double> weights) {
    check_design(design, labels, weights);
    double j = 0.0;
    for (std::size_t i = 0; i < design.rows(); ++i) {
        const double r = std::clamp(expit(row_dot(design.row(i), weights)), 1e-300, 1.0 - 1e-16);
        j += labels[i] * std::log(r) + (1.0 - labels[i]) * std::log1p(-r);
    }
    return j / static_cast<double>(design.rows());
}

std::vector<double> soft_log_likelihood_gradient(const Matrix& design,
                                                 std::span<const double> labels,
                                                 std::span<const double> weights) {
    check_design(design, labels, weights);
    std::vector<double> g(design.cols(), 0.0);
    for (std::size_t i = 0; i < design.rows(); ++i) {
        const auto phi = design.row(i);
        kernels::axpy(labels[i] - expit(row_dot(phi, weights)), phi, g);
    }
    for (double& v : g) v /= static_cast<double>(design.rows());
    return g;
}

std::vector<double> sgd_fit(const Matrix& design, std::span<const double> labels,
                            const SgdConfig& config) {
    config.validate();
    std::vector<double> w(design.cols(), 0.0);
    check_design(design, labels, w);
    for (double p : labels)
        if (!(p >= 0.0 && p <= 1.0)) throw ParameterError("labels must lie in [0, 1]");
    for (double v : design.data())
        if (!std::isfinite(v)) throw ParameterError("feature values must be finite");

    Rng rng(config.seed);
    std::vector<std::size_t> order(design.rows());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::vector<double> grad(design.cols());
    const std::size_t b = config.batch_size;
    for (int epoch = 0; epoch < config.iterations; ++epoch) {
        rng.shuffle(order.begin(), order.end());
        for (std::size_t start = 0; start < order.size(); start += b) {
            const std::size_t stop = std::min(order.size(), start + b);
            const double scale = config.learning_rate / static_cast<double>(stop - start);
            if (stop - start == 1) {
                const auto phi = design.row(order[start]);
                kernels::axpy(scale * (labels[order[start]] - expit(row_dot(phi, w))), phi, w);
                continue;
            }
            std::fill(grad.begin(), grad.end(), 0.0);
            for (std::size_t r = start; r < stop; ++r) {
                const auto phi = design.row(order[r]);
                kernels::axpy(labels[order[r]] - expit(row_dot(phi, w)), phi, grad);
            }
            kernels::axpy(scale, grad, w);
        }
    }
    for (double v : w)
        if (!std::isfinite(v)) throw ParameterError("SGD diverged; lower the learning rate");
    return w;
}

LogisticModel fit_soft_logistic(const Matrix& x, const std::vector<ColumnSpec>& columns,
                                std::span<const double> soft_labels, const SgdConfig& config) {
    return fit_soft_logistic(x, logistic_basis(columns, false), soft_labels, config);
}

LogisticModel fit_soft_logistic(const Matrix& x, std::vector<Feature> basis,
                                std::span<const double> soft_labels, const SgdConfig& config) {
    const Matrix design = evaluate_features(basis, x);
    auto w = sgd_fit(design, soft_labels, config);
    return LogisticModel(std::move(basis), std::move(w));
}

}  // namespace itr
