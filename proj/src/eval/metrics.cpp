#include "itr/eval/metrics.hpp"

#include "itr/core/error.hpp"
#include "itr/decision/decision.hpp"

namespace itr {

namespace {

void same_length(std::size_t a, std::size_t b, const char* what) {
    if (a != b) throw ParameterError(std::string(what) + " lengths differ");
}

}  // namespace

BinaryVector true_optimal_rule(std::span<const double> true_tau, const AdditiveLoss& loss) {
    BinaryVector out(true_tau.size());
    for (std::size_t i = 0; i < true_tau.size(); ++i)
        out[i] = static_cast<std::uint8_t>(additive_threshold_rule(true_tau[i], loss.c_t, loss.c_d));
    return out;
}

BinaryVector true_optimal_rule(std::span<const double> true_p1, std::span<const double> true_p0,
                               const LossTable& loss) {
    same_length(true_p1.size(), true_p0.size(), "arm");
    BinaryVector out(true_p1.size());
    for (std::size_t i = 0; i < true_p1.size(); ++i) {
        const JointPO j = joint_po(true_p1[i], true_p0[i], 0.0);
        out[i] = expected_loss(j, loss, 1) < expected_loss(j, loss, 0) ? 1 : 0;
    }
    return out;
}

double average_loss(std::span<const std::uint8_t> rule, std::span<const double> true_p1,
                    std::span<const double> true_p0, const LossTable& loss) {
    same_length(rule.size(), true_p1.size(), "rule and outcome");
    same_length(true_p1.size(), true_p0.size(), "arm");
    if (rule.empty()) throw ParameterError("cannot score an empty rule");
    double s = 0.0;
    for (std::size_t i = 0; i < rule.size(); ++i)
        s += expected_loss(joint_po(true_p1[i], true_p0[i], 0.0), loss, rule[i]);
    return s / static_cast<double>(rule.size());
}

double average_outcome(std::span<const std::uint8_t> rule, std::span<const double> true_p1,
                       std::span<const double> true_p0) {
    same_length(rule.size(), true_p1.size(), "rule and outcome");
    same_length(true_p1.size(), true_p0.size(), "arm");
    if (rule.empty()) throw ParameterError("cannot score an empty rule");
    double s = 0.0;
    for (std::size_t i = 0; i < rule.size(); ++i) s += rule[i] ? true_p1[i] : true_p0[i];
    return s / static_cast<double>(rule.size());
}

Classification classification_metrics(std::span<const std::uint8_t> rule,
                                      std::span<const std::uint8_t> truth) {
    same_length(rule.size(), truth.size(), "rule and reference");
    if (rule.empty()) throw ParameterError("cannot score an empty rule");
    std::size_t agree = 0, predicted = 0, actual = 0, hit = 0;
    for (std::size_t i = 0; i < rule.size(); ++i) {
        agree += rule[i] == truth[i];
        predicted += rule[i] != 0;
        actual += truth[i] != 0;
        hit += rule[i] && truth[i];
    }
    Classification c;
    c.accuracy = static_cast<double>(agree) / static_cast<double>(rule.size());
    if (predicted) c.precision = static_cast<double>(hit) / static_cast<double>(predicted);
    if (actual) c.recall = static_cast<double>(hit) / static_cast<double>(actual);
    return c;
}

DrawScore eval_against_draws(std::span<const std::uint8_t> rule, const PosteriorDraws& draws,
                             const LossTable& loss) {
    if (draws.draws() == 0) throw ParameterError("posterior has no draws");
    same_length(rule.size(), draws.n(), "rule and posterior");
    DrawScore out;
    for (std::size_t d = 0; d < draws.draws(); ++d) {
        out.R += average_loss(rule, draws.arm(d, 1), draws.arm(d, 0), loss);
        out.V += average_outcome(rule, draws.arm(d, 1), draws.arm(d, 0));
    }
    out.R /= static_cast<double>(draws.draws());
    out.V /= static_cast<double>(draws.draws());
    return out;
}

RuleScore score_rule(std::span<const std::uint8_t> rule, std::span<const double> true_p1,
                     std::span<const double> true_p0, std::span<const std::uint8_t> optimal,
                     const LossTable& loss) {
    RuleScore s;
    s.R = average_loss(rule, true_p1, true_p0, loss);
    s.V = average_outcome(rule, true_p1, true_p0);
    if (!optimal.empty()) {
        const Classification c = classification_metrics(rule, optimal);
        s.accuracy = c.accuracy;
        s.precision = c.precision;
        s.recall = c.recall;
    }
    return s;
}

}  // namespace itr
