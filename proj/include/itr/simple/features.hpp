#pragma once

#include <span>
#include <string>
#include <vector>

#include "itr/core/dataset.hpp"
#include "itr/core/matrix.hpp"

namespace itr {

// A model-facing feature computed from a raw input row. Raw rows are the
// dataset covariates, optionally followed by the treatment indicator.
struct Feature {
    enum class Kind {
        intercept,  // constant 1
        value,      // raw[column]
        indicator,  // 1{raw[column] == level}
    };

    std::string name;
    Kind kind = Kind::value;
    int column = -1;
    int level = 0;
    // Multiply by the treatment indicator (the last raw entry).
    bool times_treatment = false;
    // Continuous features split at midpoints; discrete ones at observed values.
    bool continuous = false;

    double eval(std::span<const double> raw, double t) const;

    friend bool operator==(const Feature&, const Feature&) = default;
};

// Splitting features for trees: binary/ordinal/continuous columns as-is,
// categorical columns one-hot. With `with_treatment`, T is appended as a
// binary feature reading raw index columns.size().
std::vector<Feature> tree_features(const std::vector<ColumnSpec>& columns, bool with_treatment);

// Logistic basis: intercept plus main effects with ordinal and categorical
// columns dummy-coded against level 1. With `with_treatment`, adds T and every
// main-effect-by-T interaction, giving 2p' + 2 terms for p' main effects.
std::vector<Feature> logistic_basis(const std::vector<ColumnSpec>& columns, bool with_treatment);

// Evaluates features on each row of `raw`. `treatment` supplies T per row when
// non-empty; otherwise T is read from the last raw column (if any feature needs it).
Matrix evaluate_features(const std::vector<Feature>& features, const Matrix& raw,
                         std::span<const double> treatment = {});

// Covariates with the treatment column appended.
Matrix append_column(const Matrix& x, std::span<const double> column);

}  // namespace itr
