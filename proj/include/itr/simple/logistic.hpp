#pragma once

#include <span>
#include <vector>

#include "itr/core/matrix.hpp"
#include "itr/simple/config.hpp"
#include "itr/simple/features.hpp"

namespace itr {

double expit(double x) noexcept;
double logit(double p) noexcept;

// r(x) = expit(w . phi(x)).
class LogisticModel {
public:
    LogisticModel() = default;
    LogisticModel(std::vector<Feature> basis, std::vector<double> weights);

    const std::vector<Feature>& basis() const noexcept { return basis_; }
    const std::vector<double>& weights() const noexcept { return weights_; }

    // `raw` holds the covariates; `t` is used by treatment terms only.
    double predict(std::span<const double> raw, double t = 0.0) const;
    int decide(std::span<const double> raw) const;

    friend bool operator==(const LogisticModel&, const LogisticModel&) = default;

private:
    std::vector<Feature> basis_;
    std::vector<double> weights_;
};

// Mean soft-label log-likelihood J(w) = (1/n) sum_i [p_i log r_i + (1 - p_i) log(1 - r_i)]
// over an evaluated design matrix.
double soft_log_likelihood(const Matrix& design, std::span<const double> labels,
                           std::span<const double> weights);
// dJ/dw = (1/n) sum_i (p_i - r_i) phi_i.
std::vector<double> soft_log_likelihood_gradient(const Matrix& design,
                                                 std::span<const double> labels,
                                                 std::span<const double> weights);

// Stochastic gradient ascent on J from w = 0: each pass shuffles the rows and
// applies w += lr * mean_batch[(p_i - r_i) phi_i] per mini-batch.
std::vector<double> sgd_fit(const Matrix& design, std::span<const double> labels,
                            const SgdConfig& config);

// Distillation onto intercept + main effects of the covariates.
LogisticModel fit_soft_logistic(const Matrix& x, const std::vector<ColumnSpec>& columns,
                                std::span<const double> soft_labels, const SgdConfig& config);
// Same, with an explicit basis.
LogisticModel fit_soft_logistic(const Matrix& x, std::vector<Feature> basis,
                                std::span<const double> soft_labels, const SgdConfig& config);

}  // namespace itr
