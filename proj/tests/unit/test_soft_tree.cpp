#include <doctest.h>

#include <cmath>
#include <limits>
#include <optional>

#include "itr/core/error.hpp"
#include "itr/core/random.hpp"
#include "itr/core/rule.hpp"
#include "itr/simple/direct.hpp"
#include "itr/simple/export.hpp"
#include "itr/simple/soft_tree.hpp"

using namespace itr;

namespace {

// Objective of a region computed row by row.
double oracle_region(const std::vector<double>& labels) {
    if (labels.empty()) return 0.0;
    long double s = 0;
    for (double p : labels) s += p;
    const long double w = std::clamp<long double>(s / labels.size(), 1e-12L, 1 - 1e-12L);
    long double j = 0;
    for (double p : labels) j += p * std::log(w) + (1 - p) * std::log(1 - w);
    return static_cast<double>(j);
}

struct OracleSplit {
    int feature = -1;
    double threshold = 0;  // an observed value; rows <= threshold go left
    double gain = -std::numeric_limits<double>::infinity();
};

OracleSplit oracle_best(const Matrix& x, const std::vector<double>& y, std::size_t min_obs) {
    OracleSplit best;
    const double parent = oracle_region(y);
    for (std::size_t k = 0; k < x.cols(); ++k) {
        for (std::size_t c = 0; c < x.rows(); ++c) {
            const double thr = x(c, k);
            std::vector<double> l, r;
            for (std::size_t i = 0; i < x.rows(); ++i) (x(i, k) <= thr ? l : r).push_back(y[i]);
            if (l.size() <= min_obs || r.size() <= min_obs) continue;
            const double g = oracle_region(l) + oracle_region(r) - parent;
            if (g > best.gain) best = {static_cast<int>(k), thr, g};
        }
    }
    return best;
}

std::vector<ColumnSpec> discrete_columns(std::size_t p) {
    std::vector<ColumnSpec> cols;
    for (std::size_t j = 0; j < p; ++j) cols.push_back({"x" + std::to_string(j), ColumnKind::ordinal(6)});
    return cols;
}

// Leaf-weighted objective of a tree over its training rows.
double tree_objective(const SoftLabelTree& t, const Matrix& x, const std::vector<double>& y) {
    std::vector<std::vector<double>> per(t.nodes().size());
    for (std::size_t i = 0; i < x.rows(); ++i) per[t.leaf_index(x.row(i))].push_back(y[i]);
    double j = 0;
    for (const auto& v : per) j += oracle_region(v);
    return j;
}

}  // namespace

TEST_CASE("region objective examples") {
    const std::vector<double> half{0.2, 0.8, 0.5, 0.5};
    const auto fit = region_objective(half);
    CHECK(fit.weight == doctest::Approx(0.5));
    CHECK(fit.objective == doctest::Approx(4 * std::log(0.5)));
    CHECK(fit.objective == doctest::Approx(-2.7725887).epsilon(1e-7));

    const std::vector<double> ones{1, 1, 1};
    CHECK(region_objective(ones).weight == 1.0);
    CHECK(region_objective(ones).objective == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(std::isfinite(region_objective(ones).objective));

    const std::vector<double> two{0.5, 0.5};
    CHECK(region_objective(two).objective == doctest::Approx(-1.3862944).epsilon(1e-7));
    CHECK(region_objective(2.0, 1.0) == doctest::Approx(-1.3862944).epsilon(1e-7));
}

TEST_CASE("a step function is recovered by one split") {
    const std::size_t n = 40;
    Matrix x(n, 1);
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) {
        x(i, 0) = static_cast<double>(i % 6 + 1);
        y[i] = x(i, 0) <= 3 ? 0.1 : 0.9;
    }
    TreeConfig cfg;
    cfg.max_depth = 1;
    const auto tree = grow_tree(x, tree_features(discrete_columns(1), false), y, cfg);
    REQUIRE(tree.nodes().size() == 3);
    CHECK(tree.nodes()[0].feature == 0);
    CHECK(tree.nodes()[0].cutoff == 3.0);
    CHECK(tree.nodes()[1].weight == doctest::Approx(0.1));
    CHECK(tree.nodes()[2].weight == doctest::Approx(0.9));
}

TEST_CASE("constant labels and tiny regions give no split") {
    Matrix x(30, 2);
    std::vector<double> y(30, 0.3);
    Rng r(1);
    for (std::size_t i = 0; i < 30; ++i) x(i, 0) = static_cast<double>(1 + r.index(6)), x(i, 1) = static_cast<double>(1 + r.index(6));
    const auto feats = tree_features(discrete_columns(2), false);
    CHECK(grow_tree(x, feats, y, TreeConfig{}).nodes().size() == 1);

    // Only the partition {first 5 | rest} separates the labels and it violates min_obs.
    Matrix z(12, 1);
    std::vector<double> w(12);
    for (std::size_t i = 0; i < 12; ++i) {
        z(i, 0) = i < 5 ? 1 : 2;
        w[i] = i < 5 ? 1 : 0;
    }
    const auto one = tree_features(discrete_columns(1), false);
    CHECK(grow_tree(z, one, w, TreeConfig{}).nodes().size() == 1);
    TreeConfig loose;
    loose.min_obs = 4;
    CHECK(grow_tree(z, one, w, loose).nodes().size() == 3);
}

TEST_CASE("continuous features split at midpoints") {
    Matrix x(20, 1);
    std::vector<double> y(20);
    for (std::size_t i = 0; i < 20; ++i) {
        x(i, 0) = static_cast<double>(i);
        y[i] = i < 10 ? 0 : 1;
    }
    const std::vector<ColumnSpec> cols{{"c", ColumnKind::continuous()}};
    const auto tree = grow_tree(x, tree_features(cols, false), y, TreeConfig{});
    CHECK(tree.nodes()[0].cutoff == 9.5);
}

TEST_CASE("best split agrees with an exhaustive oracle") {
    Rng r(77);
    TreeConfig cfg;
    for (int rep = 0; rep < 60; ++rep) {
        const std::size_t n = 30 + r.index(40), p = 1 + r.index(4);
        Matrix x(n, p);
        std::vector<double> y(n);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < p; ++j) x(i, j) = static_cast<double>(1 + r.index(6));
            y[i] = std::min(1.0, std::max(0.0, 0.3 * x(i, 0) / 6 + 0.5 * r.uniform()));
        }
        const auto feats = tree_features(discrete_columns(p), false);
        std::vector<std::size_t> rows(n);
        for (std::size_t i = 0; i < n; ++i) rows[i] = i;
        const auto got = best_split(x, feats, y, rows, cfg);
        const auto want = oracle_best(x, y, cfg.min_obs);
        if (want.feature < 0 || want.gain <= cfg.min_gain) {
            CHECK(!got);
            continue;
        }
        REQUIRE(got);
        CHECK(got->gain == doctest::Approx(want.gain).epsilon(1e-9));
        // Compare the induced partitions; the oracle's threshold can be any value in the gap.
        std::size_t agree = 0;
        for (std::size_t i = 0; i < n; ++i)
            agree += (x(i, static_cast<std::size_t>(got->feature)) <= got->cutoff) ==
                     (x(i, static_cast<std::size_t>(want.feature)) <= want.threshold);
        if (got->feature == want.feature) CHECK(agree == n);
    }
}

TEST_CASE("greedy depth-2 trees stay close to the best depth-2 partition") {
    // The exhaustive depth-2 optimum can beat greedy induction; record the gap.
    Rng r(5);
    double worst_gap = 0;
    for (int rep = 0; rep < 10; ++rep) {
        const std::size_t n = 60;
        Matrix x(n, 2);
        std::vector<double> y(n);
        for (std::size_t i = 0; i < n; ++i) {
            x(i, 0) = static_cast<double>(1 + r.index(4));
            x(i, 1) = static_cast<double>(1 + r.index(4));
            y[i] = r.uniform();
        }
        const auto feats = tree_features(discrete_columns(2), false);
        const auto greedy = grow_tree(x, feats, y, TreeConfig{});
        const double got = tree_objective(greedy, x, y);
        double best = oracle_region(y);
        for (int f = 0; f < 2; ++f)
            for (double c = 1; c < 4; ++c) {
                std::vector<std::size_t> lrow, rrow;
                for (std::size_t i = 0; i < n; ++i) (x(i, f) <= c ? lrow : rrow).push_back(i);
                if (lrow.size() <= 5 || rrow.size() <= 5) continue;
                auto side_best = [&](const std::vector<std::size_t>& rows) {
                    std::vector<double> all;
                    for (auto i : rows) all.push_back(y[i]);
                    double b = oracle_region(all);
                    for (int g = 0; g < 2; ++g)
                        for (double d = 1; d < 4; ++d) {
                            std::vector<double> a, bb;
                            for (auto i : rows) (x(i, g) <= d ? a : bb).push_back(y[i]);
                            if (a.size() <= 5 || bb.size() <= 5) continue;
                            b = std::max(b, oracle_region(a) + oracle_region(bb));
                        }
                    return b;
                };
                best = std::max(best, side_best(lrow) + side_best(rrow));
            }
        CHECK(got <= best + 1e-9);
        worst_gap = std::max(worst_gap, best - got);
    }
    MESSAGE("largest greedy gap to the depth-2 optimum: " << worst_gap);
}

TEST_CASE("sibling merging") {
    const std::vector<Feature> feats{{"a", Feature::Kind::value, 0}};
    auto leaf = [](double w, std::size_t n, int d) {
        TreeNode t;
        t.weight = w;
        t.count = n;
        t.depth = d;
        return t;
    };
    auto split = [](int l, int r, double w, std::size_t n, int d) {
        TreeNode t;
        t.feature = 0;
        t.cutoff = 1;
        t.left = l;
        t.right = r;
        t.weight = w;
        t.count = n;
        t.depth = d;
        return t;
    };
    {
        const SoftLabelTree t(feats, {split(1, 2, 0.7, 40, 0), leaf(0.6, 20, 1), leaf(0.8, 20, 1)});
        const auto m = merge_siblings(t);
        REQUIRE(m.nodes().size() == 1);
        CHECK(m.nodes()[0].weight == doctest::Approx(0.7));
    }
    {
        // Unequal counts: weighted mean 0.85.
        const SoftLabelTree t(feats, {split(1, 2, 0.85, 40, 0), leaf(0.9, 30, 1), leaf(0.7, 10, 1)});
        CHECK(merge_siblings(t).nodes()[0].weight == doctest::Approx(0.85));
    }
    {
        // Both depth-2 pairs merge, then the root pair.
        const SoftLabelTree t(feats, {split(1, 4, 0.2, 40, 0), split(2, 3, 0.2, 20, 1), leaf(0.1, 10, 2),
                                      leaf(0.3, 10, 2), split(5, 6, 0.2, 20, 1), leaf(0.2, 10, 2),
                                      leaf(0.2, 10, 2)});
        const auto m = merge_siblings(t);
        REQUIRE(m.nodes().size() == 1);
        CHECK(m.nodes()[0].weight == doctest::Approx(0.2));
        CHECK(m.nodes()[0].count == 40);
    }
    {
        const SoftLabelTree t(feats, {split(1, 2, 0.5, 40, 0), leaf(0.2, 20, 1), leaf(0.8, 20, 1)});
        CHECK(merge_siblings(t) == t);
    }
    {
        // 0.5 exactly decides control, so it merges with 0.3.
        const SoftLabelTree t(feats, {split(1, 2, 0.4, 40, 0), leaf(0.5, 20, 1), leaf(0.3, 20, 1)});
        CHECK(merge_siblings(t).nodes().size() == 1);
    }
}

TEST_CASE("merging never changes a decision") {
    Rng r(11);
    for (int rep = 0; rep < 40; ++rep) {
        const std::size_t n = 200;
        Matrix x(n, 3);
        std::vector<double> y(n);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < 3; ++j) x(i, j) = static_cast<double>(1 + r.index(6));
            y[i] = std::clamp(0.5 + 0.1 * (x(i, 0) - 3.5) + 0.3 * (r.uniform() - 0.5), 0.0, 1.0);
        }
        const auto grown = grow_tree(x, tree_features(discrete_columns(3), false), y, TreeConfig{});
        const auto merged = merge_siblings(grown);
        CHECK(merged.leaf_count() <= grown.leaf_count());
        for (std::size_t i = 0; i < n; ++i) CHECK(merged.decide(x.row(i)) == grown.decide(x.row(i)));
        // Leaf weights are the region means, the maximizer of the objective.
        for (std::size_t i = 0; i < n; ++i) CHECK(merged.predict(x.row(i)) >= 0);
        for (const auto& nd : merged.nodes()) {
            if (!nd.is_leaf()) continue;
            double s = 0;
            std::size_t c = 0;
            for (std::size_t i = 0; i < n; ++i)
                if (&merged.nodes()[merged.leaf_index(x.row(i))] == &nd) s += y[i], ++c;
            CHECK(c == nd.count);
            CHECK(nd.weight == doctest::Approx(s / static_cast<double>(c)).epsilon(1e-12));
        }
    }
}

TEST_CASE("leaf weight is the grid maximizer of the region objective") {
    Rng r(3);
    for (int rep = 0; rep < 50; ++rep) {
        std::vector<double> y(10 + r.index(30));
        for (auto& v : y) v = r.uniform();
        const auto fit = region_objective(y);
        for (int g = 1; g < 1000; ++g) {
            const double w = g / 1000.0;
            double j = 0;
            for (double p : y) j += p * std::log(w) + (1 - p) * std::log(1 - w);
            CHECK(j <= fit.objective + 1e-12);
        }
    }
}

TEST_CASE("trees round-trip through JSON") {
    Rng r(21);
    const std::size_t n = 150;
    Matrix x(n, 3);
    std::vector<double> y(n);
    const std::vector<ColumnSpec> cols{{"b", ColumnKind::binary()},
                                       {"c", ColumnKind::continuous()},
                                       {"k", ColumnKind::categorical(3)}};
    for (std::size_t i = 0; i < n; ++i) {
        x(i, 0) = r.bernoulli(0.5);
        x(i, 1) = r.normal() / 3.0;
        x(i, 2) = static_cast<double>(1 + r.index(3));
        y[i] = std::clamp(0.2 + 0.5 * x(i, 0) + 0.2 * (x(i, 2) == 2) + 0.1 * r.uniform(), 0.0, 1.0);
    }
    const auto tree = grow_tree(x, tree_features(cols, false), y, TreeConfig{});
    CHECK(tree.nodes().size() > 1);
    CHECK(tree_from_json(tree_to_json(tree)) == tree);
    const std::string text = tree_to_text(tree);
    CHECK(text.find("if ") != std::string::npos);
    CHECK(tree_to_dot(tree).find("digraph") != std::string::npos);
    CHECK_THROWS(tree_from_json("{\"type\": \"logistic\"}"));
}

TEST_CASE("a direct tree uses the treatment as a split feature") {
    Rng r(8);
    const std::size_t n = 400;
    Matrix x(n, 1);
    BinaryVector t(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
        x(i, 0) = r.bernoulli(0.5);
        t[i] = r.bernoulli(0.5);
        y[i] = r.bernoulli(t[i] ? 0.85 : 0.15);
    }
    const Dataset d({{"b", ColumnKind::binary()}}, x, t, y);
    const auto tree = fit_direct_tree(d, TreeConfig{});
    CHECK(tree.features().back().name == "T");
    CHECK(tree.nodes()[0].feature == static_cast<int>(tree.features().size()) - 1);
    const auto imputed = impute_outcomes(DirectModel{tree}, x);
    for (std::size_t i = 0; i < n; ++i) CHECK(imputed.at(0, i, 1) > imputed.at(0, i, 0));
    const auto rule = direct_rule(DirectModel{tree}, x, expand_additive(AdditiveLoss::from_percent(10)));
    for (auto v : rule) CHECK(v == 1);
}

TEST_CASE("tree inputs are validated") {
    Matrix x(10, 1);
    std::vector<double> y(10, 0.5);
    const auto feats = tree_features(discrete_columns(1), false);
    y[3] = 1.5;
    CHECK_THROWS_AS(grow_tree(x, feats, y, TreeConfig{}), ParameterError);
    y[3] = 0.5;
    x(2, 0) = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(grow_tree(x, feats, y, TreeConfig{}), ParameterError);
    TreeConfig bad;
    bad.max_depth = -1;
    CHECK_THROWS_AS(bad.validate(), ParameterError);
}

TEST_CASE("a planted depth-2 tree with a dominant root is recovered") {
    Rng r(41);
    const std::size_t n = 800;
    Matrix x(n, 3);
    std::vector<double> y(n);
    BinaryVector planted(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < 3; ++j) x(i, j) = static_cast<double>(1 + r.index(4));
        const double w = x(i, 0) <= 2 ? (x(i, 1) <= 1 ? 0.55 : 0.95) : (x(i, 2) <= 3 ? 0.05 : 0.45);
        y[i] = w;
        planted[i] = decide(w);
    }
    const auto tree = fit_soft_tree(x, discrete_columns(3), y, TreeConfig{});
    CHECK(tree.nodes()[0].feature == 0);
    CHECK(tree.nodes()[0].cutoff == 2.0);
    // Both leaves under the left child treat and the right child's leaves both
    // decline, so merging collapses the tree to the root split.
    CHECK(tree.leaf_count() == 2);
    for (std::size_t i = 0; i < n; ++i) CHECK(tree.decide(x.row(i)) == planted[i]);
}
