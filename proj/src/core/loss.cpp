#include "itr/core/loss.hpp"

#include <cmath>

#include "itr/core/error.hpp"

namespace itr {

LossTable::LossTable(const std::array<double, 8>& entries) : l_(entries) {
    for (double v : l_)
        if (!std::isfinite(v) || v < 0.0)
            throw ParameterError("loss entries must be finite and non-negative");
}

AdditiveLoss::AdditiveLoss(double treatment_cost, double outcome_cost)
    : c_t(treatment_cost), c_d(outcome_cost) {
    if (!std::isfinite(c_t) || c_t < 0.0) throw ParameterError("c_t must be finite and >= 0");
    if (!std::isfinite(c_d) || c_d <= 0.0) throw ParameterError("c_d must be finite and > 0");
}

AdditiveLoss AdditiveLoss::from_percent(double percent) { return {percent / 100.0, 1.0}; }

LossTable expand_additive(const AdditiveLoss& loss) {
    // Re-run the constructor checks: the fields are public.
    const AdditiveLoss checked(loss.c_t, loss.c_d);
    const double ct = checked.c_t;
    const double cd = checked.c_d;
    std::array<double, 8> l{};
    // Treated: outcome is Y(1) = j.
    l[LossTable::index(0, 0, 1)] = cd + ct;
    l[LossTable::index(0, 1, 1)] = cd + ct;
    l[LossTable::index(1, 0, 1)] = ct;
    l[LossTable::index(1, 1, 1)] = ct;
    // Control: outcome is Y(0) = k.
    l[LossTable::index(0, 0, 0)] = cd;
    l[LossTable::index(0, 1, 0)] = 0.0;
    l[LossTable::index(1, 0, 0)] = cd;
    l[LossTable::index(1, 1, 0)] = 0.0;
    return LossTable(l);
}

}  // namespace itr
