#pragma once

#include <array>

namespace itr {

// Loss L(Y(1)=j, Y(0)=k, t) for binary potential outcomes and a binary
// treatment choice. All entries are finite and non-negative.
class LossTable {
public:
    LossTable() = default;  // all zero
    explicit LossTable(const std::array<double, 8>& entries);

    double at(int j, int k, int t) const { return l_[index(j, k, t)]; }
    const std::array<double, 8>& entries() const noexcept { return l_; }

    static constexpr int index(int j, int k, int t) { return j * 4 + k * 2 + t; }

    friend bool operator==(const LossTable&, const LossTable&) = default;

private:
    std::array<double, 8> l_{};
};

// Additive parameterization: c_t is charged whenever treatment is given,
// c_d whenever the realized outcome under the chosen arm is 0.
struct AdditiveLoss {
    double c_t = 0.0;
    double c_d = 1.0;

    AdditiveLoss() = default;
    AdditiveLoss(double treatment_cost, double outcome_cost);

    // c_t / c_d
    double threshold() const noexcept { return c_t / c_d; }

    // Threshold given as a percentage, with c_d = 1.
    static AdditiveLoss from_percent(double percent);
};

LossTable expand_additive(const AdditiveLoss& loss);

}  // namespace itr
