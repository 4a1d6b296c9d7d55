#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "itr/core/matrix.hpp"
#include "itr/simple/config.hpp"
#include "itr/simple/features.hpp"

namespace itr {

struct TreeNode {
    // Internal nodes: rows with feature value <= cutoff go left.
    int feature = -1;
    double cutoff = 0.0;
    int left = -1;
    int right = -1;
    // Mean label of the training rows reaching this node.
    double weight = 0.0;
    std::size_t count = 0;
    int depth = 0;

    bool is_leaf() const noexcept { return feature < 0; }

    friend bool operator==(const TreeNode&, const TreeNode&) = default;
};

// Binary tree fit to (soft) labels in [0, 1]. Node 0 is the root.
class SoftLabelTree {
public:
    SoftLabelTree() = default;
    SoftLabelTree(std::vector<Feature> features, std::vector<TreeNode> nodes);

    const std::vector<Feature>& features() const noexcept { return features_; }
    const std::vector<TreeNode>& nodes() const noexcept { return nodes_; }

    // Routes a raw input row (covariates, plus T for trees over (X, T)).
    std::size_t leaf_index(std::span<const double> raw) const;
    double predict(std::span<const double> raw) const { return nodes_[leaf_index(raw)].weight; }
    int decide(std::span<const double> raw) const;

    std::size_t leaf_count() const;
    int depth() const;
    // Required raw row width.
    std::size_t input_width() const;

    friend bool operator==(const SoftLabelTree&, const SoftLabelTree&) = default;

private:
    std::vector<Feature> features_;
    std::vector<TreeNode> nodes_;
};

// Leaf weight and objective contribution of one region.
struct RegionFit {
    double weight = 0.0;
    double objective = 0.0;
};

// Probabilities are clamped to [eps, 1 - eps] before taking logs.
inline constexpr double kLogClamp = 1e-12;

// w = mean(labels); J = sum_i [p_i log w + (1 - p_i) log(1 - w)].
RegionFit region_objective(std::span<const double> labels);
// Same objective from the region's size and label sum.
double region_objective(double count, double label_sum);

struct Split {
    int feature = -1;
    double cutoff = 0.0;
    double gain = 0.0;
};

// Gains within this relative margin count as ties; ties go to the lowest
// feature index, then the lowest cutoff.
inline constexpr double kGainTieTolerance = 1e-12;

// Exhaustive scan for the best (feature, cutoff) over `rows` of the evaluated
// feature matrix. Returns nothing when no admissible split beats min_gain.
std::optional<Split> best_split(const Matrix& feature_values, const std::vector<Feature>& features,
                                std::span<const double> labels, std::span<const std::size_t> rows,
                                const TreeConfig& config);

// Greedy top-down induction without sibling merging.
SoftLabelTree grow_tree(const Matrix& raw, const std::vector<Feature>& features,
                        std::span<const double> labels, const TreeConfig& config);

// Merges sibling leaves that share the decision 1{w > 0.5}, bottom-up until
// no pair remains. Merged weight is the count-weighted mean.
SoftLabelTree merge_siblings(const SoftLabelTree& tree);

// Distillation: grow on soft labels over the covariates, then merge.
SoftLabelTree fit_soft_tree(const Matrix& x, const std::vector<ColumnSpec>& columns,
                            std::span<const double> soft_labels, const TreeConfig& config);

int tree_rule(const SoftLabelTree& tree, std::span<const double> x);

}  // namespace itr
