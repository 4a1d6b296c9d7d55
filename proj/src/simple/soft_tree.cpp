#include "itr/simple/soft_tree.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "itr/core/error.hpp"
#include "itr/core/rule.hpp"

namespace itr {

SoftLabelTree::SoftLabelTree(std::vector<Feature> features, std::vector<TreeNode> nodes)
    : features_(std::move(features)), nodes_(std::move(nodes)) {
    if (nodes_.empty()) throw ParameterError("tree needs at least one node");
    for (const auto& nd : nodes_) {
        if (nd.is_leaf()) continue;
        if (nd.feature >= static_cast<int>(features_.size()) || nd.left <= 0 || nd.right <= 0 ||
            nd.left >= static_cast<int>(nodes_.size()) || nd.right >= static_cast<int>(nodes_.size()))
            throw ParameterError("malformed tree node");
    }
}

std::size_t SoftLabelTree::leaf_index(std::span<const double> raw) const {
    if (raw.size() < input_width())
        throw PredictionError("tree expects " + std::to_string(input_width()) + " inputs, got " +
                              std::to_string(raw.size()));
    const double t = raw.empty() ? 0.0 : raw.back();
    std::size_t k = 0;
    while (!nodes_[k].is_leaf()) {
        const TreeNode& nd = nodes_[k];
        const double v = features_[static_cast<std::size_t>(nd.feature)].eval(raw, t);
        k = static_cast<std::size_t>(v <= nd.cutoff ? nd.left : nd.right);
    }
    return k;
}

int SoftLabelTree::decide(std::span<const double> raw) const { return itr::decide(predict(raw)); }

std::size_t SoftLabelTree::leaf_count() const {
    return static_cast<std::size_t>(
        std::count_if(nodes_.begin(), nodes_.end(), [](const TreeNode& n) { return n.is_leaf(); }));
}

int SoftLabelTree::depth() const {
    int d = 0;
    for (const auto& n : nodes_) d = std::max(d, n.depth);
    return d;
}

std::size_t SoftLabelTree::input_width() const {
    int w = 0;
    for (const auto& f : features_) w = std::max(w, f.column + 1);
    return static_cast<std::size_t>(w);
}

double region_objective(double count, double label_sum) {
    if (count <= 0.0) return 0.0;
    const double w = std::clamp(label_sum / count, kLogClamp, 1.0 - kLogClamp);
    return label_sum * std::log(w) + (count - label_sum) * std::log(1.0 - w);
}

RegionFit region_objective(std::span<const double> labels) {
    if (labels.empty()) throw ParameterError("region must be non-empty");
    double s = 0.0;
    for (double p : labels) s += p;
    RegionFit fit;
    fit.weight = s / static_cast<double>(labels.size());
    const double w = std::clamp(fit.weight, kLogClamp, 1.0 - kLogClamp);
    const double lw = std::log(w), l1w = std::log(1.0 - w);
    for (double p : labels) fit.objective += p * lw + (1.0 - p) * l1w;
    return fit;
}

namespace {

bool beats(double gain, double best) {
    if (best == -std::numeric_limits<double>::infinity()) return true;
    return gain > best + kGainTieTolerance * std::max(1.0, std::abs(best));
}

}  // namespace

std::optional<Split> best_split(const Matrix& fv, const std::vector<Feature>& features,
                                std::span<const double> labels, std::span<const std::size_t> rows,
                                const TreeConfig& config) {
    const std::size_t n = rows.size();
    if (n <= config.min_obs) return std::nullopt;

    double total = 0.0;
    for (auto i : rows) total += labels[i];
    const double parent = region_objective(static_cast<double>(n), total);

    Split best{-1, 0.0, -std::numeric_limits<double>::infinity()};
    std::vector<std::pair<double, std::size_t>> order(n);
    for (std::size_t k = 0; k < fv.cols(); ++k) {
        for (std::size_t r = 0; r < n; ++r) order[r] = {fv(rows[r], k), rows[r]};
        std::sort(order.begin(), order.end());
        double left_sum = 0.0;
        for (std::size_t r = 0; r + 1 < n; ++r) {
            left_sum += labels[order[r].second];
            const double here = order[r].first;
            const double next = order[r + 1].first;
            if (here == next) continue;
            const std::size_t nl = r + 1, nr = n - nl;
            if (nl <= config.min_obs || nr <= config.min_obs) continue;
            const double gain = region_objective(static_cast<double>(nl), left_sum) +
                                region_objective(static_cast<double>(nr), total - left_sum) - parent;
            if (!beats(gain, best.gain)) continue;
            double cutoff = here;
            if (features[k].continuous) {
                const double mid = 0.5 * (here + next);
                if (mid > here && mid < next) cutoff = mid;
            }
            best = {static_cast<int>(k), cutoff, gain};
        }
    }
    if (best.feature < 0 || !(best.gain > config.min_gain)) return std::nullopt;
    return best;
}

namespace {

void grow_node(const Matrix& fv, const std::vector<Feature>& features,
               std::span<const double> labels, std::vector<std::size_t> rows, int depth,
               const TreeConfig& config, std::vector<TreeNode>& nodes) {
    const std::size_t self = nodes.size();
    nodes.emplace_back();
    double s = 0.0;
    for (auto i : rows) s += labels[i];
    nodes[self].weight = s / static_cast<double>(rows.size());
    nodes[self].count = rows.size();
    nodes[self].depth = depth;

    if (depth >= config.max_depth) return;
    const auto split = best_split(fv, features, labels, rows, config);
    if (!split) return;

    std::vector<std::size_t> left, right;
    for (auto i : rows)
        (fv(i, static_cast<std::size_t>(split->feature)) <= split->cutoff ? left : right).push_back(i);
    rows.clear();
    rows.shrink_to_fit();

    nodes[self].feature = split->feature;
    nodes[self].cutoff = split->cutoff;
    nodes[self].left = static_cast<int>(nodes.size());
    grow_node(fv, features, labels, std::move(left), depth + 1, config, nodes);
    nodes[self].right = static_cast<int>(nodes.size());
    grow_node(fv, features, labels, std::move(right), depth + 1, config, nodes);
}

// Copies the subtree at `k` in preorder.
void compact(const std::vector<TreeNode>& in, int k, std::vector<TreeNode>& out) {
    const std::size_t self = out.size();
    out.push_back(in[static_cast<std::size_t>(k)]);
    if (in[static_cast<std::size_t>(k)].is_leaf()) return;
    out[self].left = static_cast<int>(out.size());
    compact(in, in[static_cast<std::size_t>(k)].left, out);
    out[self].right = static_cast<int>(out.size());
    compact(in, in[static_cast<std::size_t>(k)].right, out);
}

void merge_at(std::vector<TreeNode>& nodes, int k) {
    TreeNode& nd = nodes[static_cast<std::size_t>(k)];
    if (nd.is_leaf()) return;
    merge_at(nodes, nd.left);
    merge_at(nodes, nd.right);
    const TreeNode& l = nodes[static_cast<std::size_t>(nd.left)];
    const TreeNode& r = nodes[static_cast<std::size_t>(nd.right)];
    if (!l.is_leaf() || !r.is_leaf() || decide(l.weight) != decide(r.weight)) return;
    const double nl = static_cast<double>(l.count), nr = static_cast<double>(r.count);
    nd.weight = (l.weight * nl + r.weight * nr) / (nl + nr);
    nd.count = l.count + r.count;
    nd.feature = -1;
    nd.cutoff = 0.0;
    nd.left = nd.right = -1;
}

}  // namespace

SoftLabelTree grow_tree(const Matrix& raw, const std::vector<Feature>& features,
                        std::span<const double> labels, const TreeConfig& config) {
    config.validate();
    if (labels.size() != raw.rows()) throw ParameterError("label count differs from row count");
    if (raw.rows() == 0) throw ParameterError("cannot fit a tree to zero rows");
    for (double p : labels)
        if (!(p >= 0.0 && p <= 1.0)) throw ParameterError("labels must lie in [0, 1]");
    const Matrix fv = evaluate_features(features, raw);
    for (double v : fv.data())
        if (!std::isfinite(v)) throw ParameterError("feature values must be finite");
    std::vector<std::size_t> rows(raw.rows());
    std::iota(rows.begin(), rows.end(), std::size_t{0});
    std::vector<TreeNode> nodes;
    grow_node(fv, features, labels, std::move(rows), 0, config, nodes);
    return SoftLabelTree(features, std::move(nodes));
}

SoftLabelTree merge_siblings(const SoftLabelTree& tree) {
    std::vector<TreeNode> nodes = tree.nodes();
    merge_at(nodes, 0);
    std::vector<TreeNode> out;
    compact(nodes, 0, out);
    return SoftLabelTree(tree.features(), std::move(out));
}

SoftLabelTree fit_soft_tree(const Matrix& x, const std::vector<ColumnSpec>& columns,
                            std::span<const double> soft_labels, const TreeConfig& config) {
    if (x.rows() <= config.min_obs)
        throw ParameterError("need more than min_obs rows to fit a tree");
    return merge_siblings(grow_tree(x, tree_features(columns, false), soft_labels, config));
}

int tree_rule(const SoftLabelTree& tree, std::span<const double> x) { return tree.decide(x); }

}  // namespace itr
