#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>

#include "itr/core/error.hpp"
#include "itr/core/random.hpp"
#include "itr/flex/bart.hpp"
#include "itr/sim/scenarios.hpp"

using namespace itr;

namespace {

BartConfig small() {
    BartConfig c;
    c.num_trees = 20;
    c.iterations = 250;
    c.burn_in = 50;
    return c;
}

Dataset scenario_sample(std::size_t n, std::uint64_t seed) {
    const auto pop = sim::generate_population(sim::Scenario::E, 5 * n, seed);
    return sim::draw_sample(pop, n, seed + 1).data;
}

}  // namespace

TEST_CASE("split prior examples") {
    CHECK(split_prior_prob(0.95, 2.0, 0) == 0.95);
    CHECK(split_prior_prob(0.95, 2.0, 1) == doctest::Approx(0.2375).epsilon(1e-15));
    CHECK(split_prior_prob(0.95, 2.0, 3) == doctest::Approx(0.059375).epsilon(1e-15));
    CHECK(split_prior_prob(BartConfig::paper(), 1) == doctest::Approx(0.2375));
}

TEST_CASE("configuration defaults and validation") {
    const auto p = BartConfig::paper();
    CHECK(p.num_trees == 200);
    CHECK(p.base == 0.95);
    CHECK(p.power == 2.0);
    CHECK(p.retained() == 1000);
    CHECK(BartConfig::desk().retained() == 500);
    auto bad = p;
    bad.burn_in = bad.iterations;
    CHECK_THROWS_AS(bad.validate(), ParameterError);
    bad = p;
    bad.p_change = 0.5;
    CHECK_THROWS_AS(bad.validate(), ParameterError);
    bad = p;
    bad.base = 2.0;
    CHECK_THROWS_AS(bad.validate(), ParameterError);
}

TEST_CASE("normal cdf and quantile") {
    CHECK(normal_cdf(0) == 0.5);
    CHECK(normal_cdf(1.959963984540054) == doctest::Approx(0.975).epsilon(1e-14));
    CHECK(normal_quantile(0.975) == doctest::Approx(1.959963984540054).epsilon(1e-14));
    CHECK(normal_cdf(-40) >= 0.0);
}

TEST_CASE("fits are deterministic and draws stay inside (0, 1)") {
    const Dataset d = scenario_sample(300, 5);
    const auto cfg = small();
    const auto m1 = fit_flex(d, cfg, 42);
    const auto m2 = fit_flex(d, cfg, 42);
    CHECK(m1 == m2);
    const auto p1 = predict_draws(m1, d.x());
    CHECK(p1 == predict_draws(m2, d.x()));
    CHECK(p1.draws() == static_cast<std::size_t>(cfg.retained()));
    CHECK_NOTHROW(p1.validate());
    const auto mean1 = p1.mean(1);
    for (std::size_t i = 0; i < d.n(); ++i) {
        double lo = 1, hi = 0;
        for (std::size_t k = 0; k < p1.draws(); ++k) {
            lo = std::min(lo, p1.at(k, i, 1));
            hi = std::max(hi, p1.at(k, i, 1));
        }
        CHECK(mean1[i] >= lo);
        CHECK(mean1[i] <= hi);
    }
    CHECK(!(fit_flex(d, cfg, 43) == m1));
}

TEST_CASE("duplicate rows give identical draws") {
    const Dataset d = scenario_sample(200, 9);
    const auto m = fit_flex(d, small(), 1);
    Matrix x(2, d.p());
    for (std::size_t j = 0; j < d.p(); ++j) x(0, j) = x(1, j) = d.x()(7, j);
    const auto p = predict_draws(m, x);
    for (std::size_t k = 0; k < p.draws(); ++k)
        for (int t = 0; t < 2; ++t) CHECK(p.at(k, 0, t) == p.at(k, 1, t));
}

TEST_CASE("models round-trip through the binary artifact") {
    const Dataset d = scenario_sample(200, 12);
    const auto dir = std::filesystem::temp_directory_path();
    for (bool augment : {false, true}) {
        const auto m = fit_flex(d, small(), 77, augment);
        CHECK(m.augmented() == augment);
        const auto path = (dir / (augment ? "itr_unit_aug.bin" : "itr_unit_plain.bin")).string();
        save_model(m, path);
        const auto back = load_model(path);
        CHECK(back == m);
        CHECK(predict_draws(back, d.x()) == predict_draws(m, d.x()));
    }
    std::ofstream(dir / "itr_unit_garbage.bin") << "not a model";
    CHECK_THROWS_AS(load_model((dir / "itr_unit_garbage.bin").string()), Error);
}

TEST_CASE("prediction rejects a wrong covariate width") {
    const Dataset d = scenario_sample(100, 3);
    const auto m = fit_flex(d, small(), 2);
    CHECK_THROWS_AS(predict_draws(m, Matrix(4, d.p() + 1)), PredictionError);
    CHECK_THROWS_AS(predict_draws(m, Matrix(4, d.p() - 1)), PredictionError);
}

TEST_CASE("too few rows are refused") {
    Matrix x(9, 1);
    const Dataset d({{"a", ColumnKind::continuous()}}, x, BinaryVector(9, 0), BinaryVector(9, 1));
    CHECK_THROWS_AS(fit_flex(d, small(), 1), InsufficientData);
}

TEST_CASE("all-positive outcomes give probabilities above one half") {
    Rng r(4);
    const std::size_t n = 100;
    Matrix x(n, 2);
    BinaryVector t(n);
    for (std::size_t i = 0; i < n; ++i) {
        x(i, 0) = r.normal();
        x(i, 1) = r.bernoulli(0.5);
        t[i] = r.bernoulli(0.5);
    }
    const Dataset d({{"c", ColumnKind::continuous()}, {"b", ColumnKind::binary()}}, x, t, BinaryVector(n, 1));
    const auto p = predict_draws(fit_flex(d, small(), 8), x);
    for (int arm = 0; arm < 2; ++arm)
        for (double v : p.mean(arm)) CHECK(v > 0.5);
}

TEST_CASE("a stump on the treatment column is constant in x") {
    // Inputs are (x, T); one tree splitting T at 0.
    ForestDraw draw;
    draw.nodes = {{1, 0, 1, 2, 0.0}, {-1, -1, -1, -1, -0.3}, {-1, -1, -1, -1, 0.4}};
    draw.roots = {0};
    const ProbitForest f({{-1.0, 0.0, 2.5}, {0.0}}, 0.1, {draw});
    const double expected = normal_cdf(0.5);
    for (double x : {-3.0, -1.0, 0.0, 2.5, 7.0}) {
        const double u1[] = {x, 1.0}, u0[] = {x, 0.0};
        CHECK(f.probability(0, u1) == expected);
        CHECK(f.probability(0, u0) == normal_cdf(-0.2));
    }
    const double bad[] = {1.0};
    CHECK_THROWS(f.probability(0, bad));
}

TEST_CASE("raising a leaf never lowers a prediction") {
    const Dataset d = scenario_sample(200, 21);
    const auto m = fit_flex(d, small(), 5);
    const ProbitForest& f = m.outcome();
    const Matrix u = evaluate_features(m.outcome_inputs(), append_column(d.x(), std::vector<double>(d.n(), 1.0)));
    auto draws = f.forest_draws();
    std::size_t bumped = 0;
    for (auto& nd : draws[0].nodes)
        if (nd.var < 0 && bumped++ % 3 == 0) nd.mu += 0.25;
    const ProbitForest g(f.cut_values(), f.offset(), draws);
    std::size_t increased = 0;
    for (std::size_t i = 0; i < u.rows(); ++i) {
        CHECK(g.probability(0, u.row(i)) >= f.probability(0, u.row(i)));
        increased += g.probability(0, u.row(i)) > f.probability(0, u.row(i));
    }
    CHECK(increased > 0);
}

TEST_CASE("stored training predictions are reproduced exactly") {
    const Dataset d = scenario_sample(150, 30);
    const auto m = fit_flex(d, small(), 6);
    CHECK(m.training_x() == d.x());
    CHECK(predict_draws(m, m.training_x()) == predict_draws(m, d.x()));
}
