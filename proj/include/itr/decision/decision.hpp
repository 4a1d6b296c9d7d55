#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "itr/core/dataset.hpp"
#include "itr/core/loss.hpp"
#include "itr/flex/posterior.hpp"

namespace itr {

// P(Y(1) = j, Y(0) = k) for one individual.
struct JointPO {
    double t00 = 0.0;
    double t01 = 0.0;
    double t10 = 0.0;
    double t11 = 0.0;

    double treated_marginal() const noexcept { return t10 + t11; }  // P(Y(1) = 1)
    double control_marginal() const noexcept { return t01 + t11; }  // P(Y(0) = 1)
};

// Entries below this are treated as infeasible rather than rounding noise.
inline constexpr double kJointTolerance = 1e-12;

// Range of rho admitting a valid joint table for the given marginals.
struct RhoInterval {
    double lo = -1.0;
    double hi = 1.0;
};
RhoInterval feasible_rho(double p1, double p0);

// Joint table from marginals p1 = f(x, 1), p0 = f(x, 0) and correlation rho.
// Throws InfeasibleCorrelation if any cell falls below -kJointTolerance.
JointPO joint_po(double p1, double p0, double rho);

// sum_{j,k} l[j][k][t] * theta_jk
double expected_loss(const JointPO& joint, const LossTable& loss, int t);

// 1{tau_hat > c_t / c_d}
int additive_threshold_rule(double tau_hat, double c_t, double c_d);

struct RuleDistribution {
    // argmin_t of expected loss under the draw-averaged joint table (ties -> 0).
    BinaryVector assignments;
    // Fraction of draws whose treated loss is strictly below the control loss.
    std::vector<double> p_treat;
    // Posterior mean of f(x, 1) - f(x, 0).
    std::vector<double> tau_mean;
};

RuleDistribution optimal_rule(const PosteriorDraws& draws, const LossTable& loss, double rho = 0.0);

}  // namespace itr
