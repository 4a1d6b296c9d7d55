#pragma once

#include <optional>
#include <span>

#include "itr/core/dataset.hpp"
#include "itr/core/loss.hpp"
#include "itr/flex/posterior.hpp"

namespace itr {

struct RuleScore {
    double R = 0.0;  // average expected loss
    double V = 0.0;  // average outcome probability
    // Only when the true optimal rule is known; empty denominators stay empty.
    std::optional<double> accuracy;
    std::optional<double> precision;
    std::optional<double> recall;
};

// d*(x_i) = 1{tau_i > c_t / c_d}
BinaryVector true_optimal_rule(std::span<const double> true_tau, const AdditiveLoss& loss);
// General loss: argmin_t of expected loss under the true marginals (rho = 0, ties -> 0).
BinaryVector true_optimal_rule(std::span<const double> true_p1, std::span<const double> true_p0,
                               const LossTable& loss);

// (1/n) sum_i L(f, d(x_i), x_i) with the joint table built at rho = 0.
double average_loss(std::span<const std::uint8_t> rule, std::span<const double> true_p1,
                    std::span<const double> true_p0, const LossTable& loss);

// (1/n) sum_i f(x_i, d(x_i))
double average_outcome(std::span<const std::uint8_t> rule, std::span<const double> true_p1,
                       std::span<const double> true_p0);

struct Classification {
    double accuracy = 0.0;
    std::optional<double> precision;  // empty when the rule treats nobody
    std::optional<double> recall;     // empty when nobody should be treated
};

Classification classification_metrics(std::span<const std::uint8_t> rule,
                                      std::span<const std::uint8_t> truth);

struct DrawScore {
    double R = 0.0;
    double V = 0.0;
};

// R and V under each posterior draw's marginals, averaged over draws.
DrawScore eval_against_draws(std::span<const std::uint8_t> rule, const PosteriorDraws& draws,
                             const LossTable& loss);

// R, V and the classification metrics against ground truth.
RuleScore score_rule(std::span<const std::uint8_t> rule, std::span<const double> true_p1,
                     std::span<const double> true_p0, std::span<const std::uint8_t> optimal,
                     const LossTable& loss);

}  // namespace itr
