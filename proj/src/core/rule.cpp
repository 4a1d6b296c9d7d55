#include "itr/core/rule.hpp"

#include "itr/core/error.hpp"

namespace itr {

TreatmentRule::TreatmentRule(Assignments a) {
    for (auto v : a.assignment)
        if (v > 1) throw ParameterError("assignments must be 0/1");
    if (a.p_treat) {
        if (a.p_treat->size() != a.assignment.size())
            throw ParameterError("p_treat and assignment lengths differ");
        for (std::size_t i = 0; i < a.assignment.size(); ++i) {
            const double p = (*a.p_treat)[i];
            if (!(p >= 0.0 && p <= 1.0)) throw ParameterError("p_treat outside [0, 1]");
            if (decide(p) != a.assignment[i])
                throw ParameterError("assignment " + std::to_string(i) +
                                     " disagrees with its treatment probability");
        }
    }
    rule_ = std::move(a);
}

int TreatmentRule::predict(const Matrix& x, std::size_t i) const {
    struct Visitor {
        const Matrix& x;
        std::size_t i;
        int operator()(const Assignments& a) const {
            if (i >= a.assignment.size()) throw PredictionError("row outside the assignment vector");
            return a.assignment[i];
        }
        int operator()(const SoftLabelTree& t) const { return t.decide(x.row(i)); }
        int operator()(const LogisticModel& m) const { return m.decide(x.row(i)); }
    };
    return std::visit(Visitor{x, i}, rule_);
}

BinaryVector TreatmentRule::predict_all(const Matrix& x) const {
    BinaryVector out(x.rows());
    for (std::size_t i = 0; i < x.rows(); ++i) out[i] = static_cast<std::uint8_t>(predict(x, i));
    return out;
}

}  // namespace itr
