#pragma once

#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "itr/core/dataset.hpp"
#include "itr/simple/logistic.hpp"
#include "itr/simple/soft_tree.hpp"

namespace itr {

// Raw per-individual assignments with an optional probability of treatment.
// When present, p satisfies (p > 0.5) <=> (assignment == 1).
struct Assignments {
    BinaryVector assignment;
    std::optional<std::vector<double>> p_treat;
};

// Something that maps covariates to a treatment decision.
class TreatmentRule {
public:
    using Variant = std::variant<Assignments, SoftLabelTree, LogisticModel>;

    explicit TreatmentRule(Assignments a);
    explicit TreatmentRule(SoftLabelTree tree) : rule_(std::move(tree)) {}
    explicit TreatmentRule(LogisticModel model) : rule_(std::move(model)) {}

    const Variant& variant() const noexcept { return rule_; }

    // Decision for row `i` of the covariate matrix `x`. The Assignments
    // variant ignores the covariates and looks up row i directly.
    int predict(const Matrix& x, std::size_t i) const;
    BinaryVector predict_all(const Matrix& x) const;

private:
    Variant rule_;
};

// 1{p > 0.5}; exactly 0.5 maps to control.
inline int decide(double p) { return p > 0.5 ? 1 : 0; }

}  // namespace itr
