#include "itr/simple/direct.hpp"

#include "itr/core/error.hpp"
#include "itr/decision/decision.hpp"

namespace itr {

namespace {

std::vector<double> as_double(const BinaryVector& v) { return {v.begin(), v.end()}; }

}  // namespace

SoftLabelTree fit_direct_tree(const Dataset& data, const TreeConfig& config) {
    if (data.n() <= config.min_obs) throw InsufficientData("need more than min_obs rows");
    const auto t = as_double(data.t());
    const auto y = as_double(data.y());
    return grow_tree(append_column(data.x(), t), tree_features(data.columns(), true), y, config);
}

LogisticModel fit_direct_logistic(const Dataset& data, const SgdConfig& config) {
    if (data.n() == 0) throw InsufficientData("cannot fit to zero rows");
    auto basis = logistic_basis(data.columns(), true);
    const auto t = as_double(data.t());
    const auto y = as_double(data.y());
    auto w = sgd_fit(evaluate_features(basis, data.x(), t), y, config);
    return LogisticModel(std::move(basis), std::move(w));
}

PosteriorDraws impute_outcomes(const DirectModel& model, const Matrix& x) {
    PosteriorDraws out(1, x.rows());
    if (const auto* tree = std::get_if<SoftLabelTree>(&model)) {
        std::vector<double> raw(x.cols() + 1);
        for (std::size_t i = 0; i < x.rows(); ++i) {
            const auto row = x.row(i);
            std::copy(row.begin(), row.end(), raw.begin());
            for (int t = 0; t < 2; ++t) {
                raw.back() = t;
                out.at(0, i, t) = tree->predict(raw);
            }
        }
    } else {
        const auto& m = std::get<LogisticModel>(model);
        for (std::size_t i = 0; i < x.rows(); ++i)
            for (int t = 0; t < 2; ++t) out.at(0, i, t) = m.predict(x.row(i), t);
    }
    return out;
}

BinaryVector direct_rule(const DirectModel& model, const Matrix& x, const LossTable& loss,
                         double rho) {
    return optimal_rule(impute_outcomes(model, x), loss, rho).assignments;
}

}  // namespace itr
