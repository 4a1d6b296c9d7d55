#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "itr/core/dataset.hpp"
#include "itr/core/matrix.hpp"
#include "itr/flex/bart_config.hpp"
#include "itr/flex/posterior.hpp"
#include "itr/simple/features.hpp"

namespace itr {

// One retained draw of the ensemble, flattened. Leaves have var < 0.
struct FlatNode {
    std::int32_t var = -1;
    std::int32_t cut = -1;
    std::int32_t left = -1;
    std::int32_t right = -1;
    double mu = 0.0;

    friend bool operator==(const FlatNode&, const FlatNode&) = default;
};

struct ForestDraw {
    std::vector<FlatNode> nodes;
    std::vector<std::uint32_t> roots;  // one per tree

    friend bool operator==(const ForestDraw&, const ForestDraw&) = default;
};

// Posterior sample of a probit sum-of-trees model P(y = 1 | u) = Phi(offset + G(u))
// over a numeric input matrix u.
class ProbitForest {
public:
    ProbitForest() = default;
    ProbitForest(std::vector<std::vector<double>> cut_values, double offset,
                 std::vector<ForestDraw> draws);

    std::size_t draws() const noexcept { return draws_.size(); }
    std::size_t input_width() const noexcept { return cuts_.size(); }
    double offset() const noexcept { return offset_; }
    const std::vector<std::vector<double>>& cut_values() const noexcept { return cuts_; }
    const std::vector<ForestDraw>& forest_draws() const noexcept { return draws_; }

    // offset + sum of leaf values, trees added in order.
    double latent(std::size_t draw, std::span<const double> u) const;
    double probability(std::size_t draw, std::span<const double> u) const;
    // Posterior mean probability for each row of u.
    std::vector<double> mean_probability(const Matrix& u) const;

    friend bool operator==(const ProbitForest&, const ProbitForest&) = default;

private:
    std::vector<std::vector<double>> cuts_;
    double offset_ = 0.0;
    std::vector<ForestDraw> draws_;
};

// Backfitting MCMC with Albert-Chib latent variables. Split values are the
// distinct observed values of each input column (x <= value goes left).
ProbitForest sample_probit_forest(const Matrix& inputs, const BinaryVector& y,
                                  const BartConfig& config, std::uint64_t seed);

// Flexible outcome model f(x, t) = Phi(G(x, t [, e(x)])) where e(x) is an
// optional posterior-mean propensity from a second forest fit to T.
class FittedFlexModel {
public:
    FittedFlexModel() = default;
    FittedFlexModel(std::vector<ColumnSpec> columns, std::string treatment_name,
                    std::string outcome_name, BartConfig config, std::uint64_t seed,
                    std::vector<Feature> outcome_inputs, ProbitForest outcome,
                    std::vector<Feature> propensity_inputs, std::optional<ProbitForest> propensity,
                    Matrix training_x);

    const std::vector<ColumnSpec>& columns() const noexcept { return columns_; }
    const std::string& treatment_name() const noexcept { return treatment_name_; }
    const std::string& outcome_name() const noexcept { return outcome_name_; }
    const BartConfig& config() const noexcept { return config_; }
    std::uint64_t seed() const noexcept { return seed_; }
    const std::vector<Feature>& outcome_inputs() const noexcept { return outcome_inputs_; }
    const ProbitForest& outcome() const noexcept { return outcome_; }
    const std::vector<Feature>& propensity_inputs() const noexcept { return propensity_inputs_; }
    const std::optional<ProbitForest>& propensity() const noexcept { return propensity_; }
    bool augmented() const noexcept { return propensity_.has_value(); }
    const Matrix& training_x() const noexcept { return training_x_; }

    // Posterior-mean propensity for each row (augmented models only).
    std::vector<double> propensity_scores(const Matrix& x) const;

    friend bool operator==(const FittedFlexModel&, const FittedFlexModel&) = default;

private:
    std::vector<ColumnSpec> columns_;
    std::string treatment_name_;
    std::string outcome_name_;
    BartConfig config_;
    std::uint64_t seed_ = 0;
    std::vector<Feature> outcome_inputs_;
    ProbitForest outcome_;
    std::vector<Feature> propensity_inputs_;
    std::optional<ProbitForest> propensity_;
    Matrix training_x_;
};

FittedFlexModel fit_flex(const Dataset& data, const BartConfig& config, std::uint64_t seed,
                         bool augment_with_propensity = false);

// f(x_i, t) for every retained draw and t in {0, 1}; x has the training covariate columns.
PosteriorDraws predict_draws(const FittedFlexModel& model, const Matrix& x);

// Versioned binary artifact.
void save_model(const FittedFlexModel& model, const std::string& path);
FittedFlexModel load_model(const std::string& path);

double normal_cdf(double x) noexcept;
double normal_quantile(double p);

}  // namespace itr
