#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <map>
#include <set>

#include "itr/core/error.hpp"
#include "itr/core/random.hpp"
#include "itr/sim/scenarios.hpp"

using namespace itr;
using namespace itr::sim;

namespace {

long double expit_ld(long double v) { return 1.0L / (1.0L + std::exp(-v)); }

// Scenario logits transcribed from the published formulas, addressing
// covariates by name.
struct Oracle {
    std::map<std::string, std::size_t> at;
    Oracle() {
        const auto cols = covariate_schema();
        for (std::size_t j = 0; j < cols.size(); ++j) at[cols[j].name] = j;
    }
    long double v(std::span<const double> x, const char* name) const { return x[at.at(name)]; }
    // X_{name level}
    long double d(std::span<const double> x, const char* name, int level) const {
        return v(x, name) == level ? 1.0L : 0.0L;
    }
    long double logit(char s, std::span<const double> x, int t) const {
        const long double T = t;
        switch (s) {
            case 'A': return 0.5L * d(x, "X_C", 1) + 2 * (d(x, "X_B", 1) + d(x, "X_a", 3) * d(x, "X_A", 1)) * T;
            case 'B':
                return 0.5L * d(x, "X_C", 1) +
                       2 * (d(x, "X_B", 1) + d(x, "X_a", 3) * (d(x, "X_b", 2) + d(x, "X_b", 3))) * T;
            case 'C':
                return 0.05L * (-d(x, "X_A", 1) + d(x, "X_B", 1)) +
                       ((d(x, "X_a", 2) + d(x, "X_a", 3)) + (d(x, "X_b", 2) + d(x, "X_b", 3)) * v(x, "X_Ca")) * T;
            case 'D': {
                const long double e = (d(x, "X_b", 3) + d(x, "X_c", 3)) +
                                      5 * (d(x, "X_a", 2) + d(x, "X_a", 3) + d(x, "X_A", 1) * d(x, "X_B", 1)) * T + 20;
                return std::log(std::log(e * e));
            }
            case 'E': return d(x, "X_A", 1) + d(x, "X_B", 1) + 2 * T;
            case 'F':
                return 0.5L * d(x, "X_A", 1) + 0.5L * d(x, "X_B", 1) +
                       2 * ((v(x, "X_Ca") < 5 && v(x, "X_a") < 2) ? 1 : 0) * T;
            case 'G':
                return 0.5L * d(x, "X_A", 1) + 0.5L * d(x, "X_B", 1) +
                       2 * ((v(x, "X_Ca") < 5 && v(x, "X_Cb") < 2) ? 1 : 0) * T;
            case 'H':
                return 0.5L * v(x, "X_Ca") + 0.5L * v(x, "X_Cb") +
                       2 * ((v(x, "X_Ca") < -2 && v(x, "X_Cb") > 2) ? 1 : 0) * T;
        }
        return 0;
    }
};

std::vector<double> row_with(std::initializer_list<std::pair<const char*, double>> values) {
    Oracle o;
    std::vector<double> x(kNumCols, 1.0);
    x[o.at["X_A"]] = x[o.at["X_B"]] = x[o.at["X_C"]] = x[o.at["X_D"]] = x[o.at["X_E"]] = 0;
    x[o.at["X_Ca"]] = x[o.at["X_Cb"]] = 0;
    for (auto [k, v] : values) x[o.at[k]] = v;
    return x;
}

double corr(const std::vector<double>& a, const std::vector<double>& b) {
    const double n = static_cast<double>(a.size());
    double ma = 0, mb = 0;
    for (std::size_t i = 0; i < a.size(); ++i) ma += a[i] / n, mb += b[i] / n;
    double sab = 0, saa = 0, sbb = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        sab += (a[i] - ma) * (b[i] - mb);
        saa += (a[i] - ma) * (a[i] - ma);
        sbb += (b[i] - mb) * (b[i] - mb);
    }
    return sab / std::sqrt(saa * sbb);
}

}  // namespace

TEST_CASE("schema layout") {
    const auto cols = covariate_schema();
    REQUIRE(cols.size() == 12);
    CHECK(cols[0].name == "X_A");
    CHECK(cols[0].kind == ColumnKind::binary());
    CHECK(cols[5].name == "X_a");
    CHECK(cols[5].kind == ColumnKind::ordinal(4));
    CHECK(cols[11].name == "X_Cb");
    CHECK(cols[11].kind == ColumnKind::continuous());
}

TEST_CASE("logit examples") {
    const auto x = row_with({{"X_A", 1}, {"X_B", 0}});
    CHECK(true_logit(Scenario::E, x, 1) == 3.0);
    CHECK(true_logit(Scenario::E, x, 0) == 1.0);
    const auto y = row_with({{"X_C", 0}, {"X_B", 1}});
    CHECK(true_logit(Scenario::A, y, 1) == 2.0);
    CHECK(true_logit("E", x, 1) == 3.0);
    CHECK_THROWS_AS(true_logit("Z", x, 1), ParameterError);
    CHECK_THROWS_AS(parse_scenario("e"), ParameterError);
}

TEST_CASE("CATE examples against a long-double oracle") {
    const long double e00 = expit_ld(2) - expit_ld(0);
    const long double e11 = expit_ld(4) - expit_ld(2);
    CHECK(true_cate(Scenario::E, row_with({})) == doctest::Approx(static_cast<double>(e00)).epsilon(1e-15));
    CHECK(true_cate(Scenario::E, row_with({{"X_A", 1}, {"X_B", 1}})) ==
          doctest::Approx(static_cast<double>(e11)).epsilon(1e-14));
    CHECK(true_cate(Scenario::E, row_with({})) == doctest::Approx(0.3808).epsilon(1e-4));
    CHECK(true_cate(Scenario::E, row_with({{"X_A", 1}, {"X_B", 1}})) == doctest::Approx(0.1012).epsilon(1e-3));
    CHECK(true_cate(Scenario::F, row_with({{"X_Ca", 6}, {"X_a", 1}})) == 0.0);
}

TEST_CASE("every scenario matches the transcribed formulas") {
    const Matrix x = sample_covariates(2000, 99);
    const Oracle o;
    for (auto s : all_scenarios()) {
        const char id = scenario_id(s);
        for (std::size_t i = 0; i < x.rows(); ++i)
            for (int t = 0; t < 2; ++t) {
                const double got = true_logit(s, x.row(i), t);
                CHECK(got == doctest::Approx(static_cast<double>(o.logit(id, x.row(i), t))).epsilon(1e-13));
                const double p = 1 / (1 + std::exp(-got));
                CHECK(p > 0.0);
                CHECK(p < 1.0);
            }
    }
}

TEST_CASE("nested log argument stays defined") {
    Rng r(1);
    const Oracle o;
    const Matrix x = sample_covariates(10000, 5);
    for (std::size_t i = 0; i < x.rows(); ++i) {
        const int t = r.bernoulli(0.5);
        const auto row = x.row(i);
        const double e = (o.d(row, "X_b", 3) + o.d(row, "X_c", 3)) +
                         5 * (o.d(row, "X_a", 2) + o.d(row, "X_a", 3) + o.d(row, "X_A", 1) * o.d(row, "X_B", 1)) * t + 20;
        CHECK(e * e >= 400);
        CHECK(std::isfinite(true_logit(Scenario::D, row, t)));
    }
}

TEST_CASE("scenario E's CATE depends only on X_A and X_B") {
    Rng r(2);
    const Matrix x = sample_covariates(500, 3);
    const Oracle o;
    for (std::size_t i = 0; i < x.rows(); ++i) {
        std::vector<double> row(x.row(i).begin(), x.row(i).end());
        const double base = true_cate(Scenario::E, row);
        const Matrix other = sample_covariates(1, 1000 + i);
        for (std::size_t j = 0; j < kNumCols; ++j)
            if (j != o.at.at("X_A") && j != o.at.at("X_B")) row[j] = other(0, j);
        CHECK(true_cate(Scenario::E, row) == base);
    }
}

TEST_CASE("propensity examples") {
    const std::vector<double> tau{0.0, 1.0, 2.0};  // mean 1, sample sd 1
    const auto p = propensity(tau, std::log(3.0));
    CHECK(p[0] == doctest::Approx(0.25));
    CHECK(p[1] == 0.5);
    CHECK(p[2] == doctest::Approx(0.75));
    for (double v : propensity(tau, 0.0)) CHECK(v == 0.5);
    CHECK_THROWS_AS(propensity(std::vector<double>{0.2, 0.2, 0.2}, 1.0), DegenerateCate);

    Rng r(4);
    std::vector<double> many(300);
    for (auto& v : many) v = r.uniform();
    const auto q = propensity(many, 1.1);
    for (std::size_t i = 0; i < many.size(); ++i)
        for (std::size_t j = 0; j < many.size(); ++j)
            if (many[i] < many[j]) CHECK(q[i] <= q[j]);
}

TEST_CASE("population generation") {
    const auto pop = generate_population(Scenario::E, 100000, 17);
    REQUIRE(pop.data.n() == 100000);
    double y1 = 0, p1 = 0, y0 = 0, p0 = 0, n1 = 0, n0 = 0;
    std::vector<double> t(pop.data.n());
    for (std::size_t i = 0; i < pop.data.n(); ++i) {
        t[i] = pop.data.t()[i];
        if (pop.data.t()[i]) y1 += pop.data.y()[i], p1 += pop.true_p1[i], ++n1;
        else y0 += pop.data.y()[i], p0 += pop.true_p0[i], ++n0;
        CHECK(pop.true_tau[i] == pop.true_p1[i] - pop.true_p0[i]);
        CHECK(pop.propensity[i] > 0.0);
        CHECK(pop.propensity[i] < 1.0);
    }
    CHECK(std::abs(y1 / n1 - p1 / n1) < 0.01);
    CHECK(std::abs(y0 / n0 - p0 / n0) < 0.01);
    CHECK(corr(t, pop.true_tau) > 0);

    // Covariate laws.
    const Matrix& x = pop.data.x();
    const Oracle o;
    double a1 = 0, b3 = 0, ca = 0, ca2 = 0;
    for (std::size_t i = 0; i < x.rows(); ++i) {
        a1 += o.d(x.row(i), "X_A", 1);
        b3 += o.d(x.row(i), "X_b", 3);
        ca += o.v(x.row(i), "X_Ca");
        ca2 += o.v(x.row(i), "X_Ca") * o.v(x.row(i), "X_Ca");
    }
    const double n = static_cast<double>(x.rows());
    CHECK(std::abs(a1 / n - 0.5) < 0.01);
    CHECK(std::abs(b3 / n - 0.25) < 0.01);
    CHECK(std::abs(ca / n) < 0.02);
    CHECK(std::abs(ca2 / n - 1) < 0.03);

    const auto flat = generate_population(Scenario::E, 1000, 17, 0.0);
    for (double e : flat.propensity) CHECK(e == 0.5);
}

TEST_CASE("treated rows carry larger effects in every heterogeneous scenario") {
    for (auto s : all_scenarios()) {
        const auto pop = generate_population(s, 10000, 23);
        double t1 = 0, t0 = 0, n1 = 0, n0 = 0, lo = 1, hi = -1;
        for (std::size_t i = 0; i < pop.data.n(); ++i) {
            lo = std::min(lo, pop.true_tau[i]);
            hi = std::max(hi, pop.true_tau[i]);
            if (pop.data.t()[i]) t1 += pop.true_tau[i], ++n1;
            else t0 += pop.true_tau[i], ++n0;
        }
        if (hi - lo < 1e-12) continue;
        CHECK_MESSAGE(t1 / n1 > t0 / n0, "scenario " << scenario_id(s));
    }
}

TEST_CASE("generation is reproducible") {
    const auto a = generate_population(Scenario::C, 500, 3);
    const auto b = generate_population(Scenario::C, 500, 3);
    CHECK(a.data == b.data);
    CHECK(a.propensity == b.propensity);
    CHECK(!(generate_population(Scenario::C, 500, 4).data == a.data));
}

TEST_CASE("draw_sample examples") {
    const auto pop = generate_population(Scenario::A, 300, 8);
    const auto all = draw_sample(pop, 300, 1);
    std::set<std::size_t> seen(all.source_rows.begin(), all.source_rows.end());
    CHECK(seen.size() == 300);
    for (std::size_t i = 0; i < 300; ++i) {
        const std::size_t src = all.source_rows[i];
        CHECK(all.true_tau[i] == pop.true_tau[src]);
        CHECK(all.data.y()[i] == pop.data.y()[src]);
    }
    const auto one = draw_sample(pop, 1, 2);
    CHECK(one.data.n() == 1);
    CHECK(one.source_rows[0] < 300);
    CHECK(draw_sample(pop, 50, 9).source_rows == draw_sample(pop, 50, 9).source_rows);
    CHECK_THROWS_AS(draw_sample(pop, 301, 1), ParameterError);
    CHECK_THROWS_AS(draw_sample(pop, 0, 1), ParameterError);
}

TEST_CASE("ground truth round-trips") {
    const auto pop = generate_population(Scenario::G, 200, 5);
    const auto path = std::filesystem::temp_directory_path() / "itr_unit_truth.csv";
    save_ground_truth(pop, path.string());
    const auto back = load_ground_truth(path.string());
    CHECK(back.true_p1 == pop.true_p1);
    CHECK(back.true_p0 == pop.true_p0);
    CHECK(back.true_tau == pop.true_tau);
    CHECK(back.propensity == pop.propensity);
}
