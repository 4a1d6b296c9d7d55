#pragma once

#include <span>
#include <variant>

#include "itr/core/dataset.hpp"
#include "itr/core/loss.hpp"
#include "itr/flex/posterior.hpp"
#include "itr/simple/logistic.hpp"
#include "itr/simple/soft_tree.hpp"

namespace itr {

// Simple outcome model f(x, t) fit straight to observed (X, T, Y).
using DirectModel = std::variant<SoftLabelTree, LogisticModel>;

// Tree over (X, T) on hard labels Y. No sibling merging.
SoftLabelTree fit_direct_tree(const Dataset& data, const TreeConfig& config);

// Logistic regression on intercept, main effects, T and all X-by-T interactions.
LogisticModel fit_direct_logistic(const Dataset& data, const SgdConfig& config);

// f(x_i, 1) and f(x_i, 0) as a single-draw posterior.
PosteriorDraws impute_outcomes(const DirectModel& model, const Matrix& x);

// Loss-minimizing assignments under the imputed potential outcomes.
BinaryVector direct_rule(const DirectModel& model, const Matrix& x, const LossTable& loss,
                         double rho = 0.0);

}  // namespace itr
