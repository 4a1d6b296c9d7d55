#include "itr/decision/decision.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

#include "itr/core/error.hpp"
#include "itr/kernels/kernels.hpp"

namespace itr {

namespace {

void check_marginal(double p, const char* name) {
    if (!(p >= 0.0 && p <= 1.0))
        throw ParameterError(std::string(name) + " must lie in [0, 1]");
}

[[noreturn]] void infeasible(double p1, double p0, double rho) {
    const RhoInterval r = feasible_rho(p1, p0);
    std::ostringstream os;
    os << "rho = " << rho << " is infeasible for p1 = " << p1 << ", p0 = " << p0
       << "; feasible range is [" << r.lo << ", " << r.hi << "]";
    throw InfeasibleCorrelation(os.str(), r.lo, r.hi);
}

}  // namespace

RhoInterval feasible_rho(double p1, double p0) {
    check_marginal(p1, "p1");
    check_marginal(p0, "p0");
    const double s = std::sqrt(p1 * (1.0 - p1) * p0 * (1.0 - p0));
    if (s == 0.0) return {};
    const double pp = p1 * p0;
    return {std::max(-1.0, (std::max(0.0, p1 + p0 - 1.0) - pp) / s),
            std::min(1.0, (std::min(p1, p0) - pp) / s)};
}

JointPO joint_po(double p1, double p0, double rho) {
    check_marginal(p1, "p1");
    check_marginal(p0, "p0");
    if (!(rho >= -1.0 && rho <= 1.0)) throw ParameterError("rho must lie in [-1, 1]");
    JointPO j;
    kernels::scalar_table().joint_po(&p1, &p0, rho, &j.t11, &j.t10, &j.t01, &j.t00, 1);
    if (std::min({j.t00, j.t01, j.t10, j.t11}) < -kJointTolerance) infeasible(p1, p0, rho);
    return j;
}

double expected_loss(const JointPO& joint, const LossTable& loss, int t) {
    return ((loss.at(0, 0, t) * joint.t00 + loss.at(0, 1, t) * joint.t01) + loss.at(1, 0, t) * joint.t10) +
           loss.at(1, 1, t) * joint.t11;
}

int additive_threshold_rule(double tau_hat, double c_t, double c_d) {
    const AdditiveLoss loss(c_t, c_d);
    return tau_hat > loss.c_t / loss.c_d ? 1 : 0;
}

RuleDistribution optimal_rule(const PosteriorDraws& draws, const LossTable& loss, double rho) {
    if (draws.draws() == 0) throw ParameterError("posterior has no draws");
    if (!(rho >= -1.0 && rho <= 1.0)) throw ParameterError("rho must lie in [-1, 1]");
    const std::size_t n = draws.n();
    const auto& k = kernels::active();

    std::array<double, 4> l1{}, l0{};
    for (int t = 0; t < 2; ++t) {
        auto& l = t ? l1 : l0;
        l = {loss.at(0, 0, t), loss.at(0, 1, t), loss.at(1, 0, t), loss.at(1, 1, t)};
    }

    std::vector<double> t00(n), t01(n), t10(n), t11(n), loss1(n), loss0(n);
    std::vector<double> s00(n, 0.0), s01(n, 0.0), s10(n, 0.0), s11(n, 0.0), wins(n, 0.0);
    for (std::size_t d = 0; d < draws.draws(); ++d) {
        const auto p1 = draws.arm(d, 1), p0 = draws.arm(d, 0);
        for (std::size_t i = 0; i < n; ++i) {
            check_marginal(p1[i], "p1");
            check_marginal(p0[i], "p0");
        }
        k.joint_po(p1.data(), p0.data(), rho, t11.data(), t10.data(), t01.data(), t00.data(), n);
        for (std::size_t i = 0; i < n; ++i)
            if (std::min({t00[i], t01[i], t10[i], t11[i]}) < -kJointTolerance)
                infeasible(p1[i], p0[i], rho);
        k.expected_loss(t00.data(), t01.data(), t10.data(), t11.data(), l1.data(), loss1.data(), n);
        k.expected_loss(t00.data(), t01.data(), t10.data(), t11.data(), l0.data(), loss0.data(), n);
        k.count_less(loss1.data(), loss0.data(), wins.data(), n);
        k.axpy(1.0, t00.data(), s00.data(), n);
        k.axpy(1.0, t01.data(), s01.data(), n);
        k.axpy(1.0, t10.data(), s10.data(), n);
        k.axpy(1.0, t11.data(), s11.data(), n);
    }

    const double inv = 1.0 / static_cast<double>(draws.draws());
    RuleDistribution out;
    out.assignments.resize(n);
    out.p_treat.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const JointPO avg{s00[i] * inv, s01[i] * inv, s10[i] * inv, s11[i] * inv};
        out.assignments[i] = expected_loss(avg, loss, 1) < expected_loss(avg, loss, 0) ? 1 : 0;
        out.p_treat[i] = wins[i] * inv;
    }
    out.tau_mean = draws.mean_tau();
    return out;
}

}  // namespace itr
