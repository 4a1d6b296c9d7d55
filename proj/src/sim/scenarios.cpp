#include "itr/sim/scenarios.hpp"

#include <fstream>
#include <numeric>

#include "itr/core/csv.hpp"
#include "itr/core/error.hpp"
#include "itr/core/random.hpp"
#include "itr/simple/logistic.hpp"

namespace itr::sim {

std::vector<ColumnSpec> covariate_schema() {
    std::vector<ColumnSpec> c;
    for (const char* n : {"X_A", "X_B", "X_C", "X_D", "X_E"}) c.push_back({n, ColumnKind::binary()});
    for (const char* n : {"X_a", "X_b", "X_c", "X_d", "X_e"}) c.push_back({n, ColumnKind::ordinal(4)});
    for (const char* n : {"X_Ca", "X_Cb"}) c.push_back({n, ColumnKind::continuous()});
    return c;
}

Scenario parse_scenario(const std::string& id) {
    if (id.size() == 1 && id[0] >= 'A' && id[0] <= 'H') return static_cast<Scenario>(id[0] - 'A');
    throw ParameterError("unknown scenario '" + id + "' (expected one of A-H)");
}

char scenario_id(Scenario s) { return static_cast<char>('A' + static_cast<int>(s)); }

std::vector<Scenario> all_scenarios() {
    std::vector<Scenario> out;
    for (int s = 0; s < 8; ++s) out.push_back(static_cast<Scenario>(s));
    return out;
}

Matrix sample_covariates(std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    Matrix x(n, kNumCols);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = XA; j <= XE; ++j) x(i, j) = rng.bernoulli(0.5) ? 1.0 : 0.0;
        for (std::size_t j = Xa; j <= Xe; ++j) x(i, j) = 1.0 + static_cast<double>(rng.index(4));
        x(i, XCa) = rng.normal();
        x(i, XCb) = rng.normal();
    }
    return x;
}

namespace {

double is(std::span<const double> x, Col c, double level) { return x[c] == level ? 1.0 : 0.0; }

}  // namespace

double true_logit(Scenario s, std::span<const double> x, int t) {
    if (x.size() != kNumCols)
        throw ParameterError("scenario covariates need " + std::to_string(kNumCols) + " columns");
    const double T = t;
    const double A1 = is(x, XA, 1), B1 = is(x, XB, 1), C1 = is(x, XC, 1);
    switch (s) {
        case Scenario::A: return 0.5 * C1 + 2.0 * (B1 + is(x, Xa, 3) * A1) * T;
        case Scenario::B:
            return 0.5 * C1 + 2.0 * (B1 + is(x, Xa, 3) * (is(x, Xb, 2) + is(x, Xb, 3))) * T;
        case Scenario::C:
            return 0.05 * (-A1 + B1) +
                   ((is(x, Xa, 2) + is(x, Xa, 3)) + (is(x, Xb, 2) + is(x, Xb, 3)) * x[XCa]) * T;
        case Scenario::D: {
            const double inner = (is(x, Xb, 3) + is(x, Xc, 3)) +
                                 5.0 * (is(x, Xa, 2) + is(x, Xa, 3) + A1 * B1) * T + 20.0;
            return std::log(std::log(inner * inner));
        }
        case Scenario::E: return (A1 + B1) + 2.0 * T;
        case Scenario::F:
            return 0.5 * A1 + 0.5 * B1 + 2.0 * ((x[XCa] < 5.0 && x[Xa] < 2.0) ? 1.0 : 0.0) * T;
        case Scenario::G:
            return 0.5 * A1 + 0.5 * B1 + 2.0 * ((x[XCa] < 5.0 && x[XCb] < 2.0) ? 1.0 : 0.0) * T;
        case Scenario::H:
            return 0.5 * x[XCa] + 0.5 * x[XCb] +
                   2.0 * ((x[XCa] < -2.0 && x[XCb] > 2.0) ? 1.0 : 0.0) * T;
    }
    throw ParameterError("unknown scenario");
}

double true_logit(const std::string& scenario, std::span<const double> x, int t) {
    return true_logit(parse_scenario(scenario), x, t);
}

double true_cate(Scenario s, std::span<const double> x) {
    return expit(true_logit(s, x, 1)) - expit(true_logit(s, x, 0));
}

std::vector<double> propensity(std::span<const double> tau, double lambda) {
    if (tau.size() < 2) throw ParameterError("propensity needs at least two CATE values");
    if (!std::isfinite(lambda)) throw ParameterError("lambda must be finite");
    const double n = static_cast<double>(tau.size());
    const double mean = std::accumulate(tau.begin(), tau.end(), 0.0) / n;
    double ss = 0.0;
    for (double v : tau) ss += (v - mean) * (v - mean);
    const double sd = std::sqrt(ss / (n - 1.0));
    const auto [lo, hi] = std::minmax_element(tau.begin(), tau.end());
    if (*lo == *hi || !(sd > 0.0)) throw DegenerateCate("CATE has zero standard deviation");
    std::vector<double> out(tau.size());
    for (std::size_t i = 0; i < tau.size(); ++i) out[i] = expit(lambda * (tau[i] - mean) / sd);
    return out;
}

SimPopulation generate_population(Scenario s, std::size_t population_size, std::uint64_t seed,
                                  double lambda) {
    if (population_size < 2) throw ParameterError("population size must be at least 2");
    Matrix x = sample_covariates(population_size, derive_seed(seed, stream::covariates));
    const std::size_t n = population_size;
    std::vector<double> p1(n), p0(n), tau(n);
    for (std::size_t i = 0; i < n; ++i) {
        p1[i] = expit(true_logit(s, x.row(i), 1));
        p0[i] = expit(true_logit(s, x.row(i), 0));
        tau[i] = p1[i] - p0[i];
    }
    std::vector<double> e;
    try {
        e = propensity(tau, lambda);
    } catch (const DegenerateCate&) {
        e.assign(n, 0.5);
    }
    Rng trng(derive_seed(seed, stream::treatment));
    Rng yrng(derive_seed(seed, stream::outcome));
    BinaryVector t(n), y(n);
    for (std::size_t i = 0; i < n; ++i) t[i] = trng.bernoulli(e[i]);
    for (std::size_t i = 0; i < n; ++i) y[i] = yrng.bernoulli(t[i] ? p1[i] : p0[i]);
    std::vector<std::size_t> rows(n);
    std::iota(rows.begin(), rows.end(), std::size_t{0});
    return {Dataset(covariate_schema(), std::move(x), std::move(t), std::move(y)),
            std::move(p1),
            std::move(p0),
            std::move(tau),
            std::move(e),
            std::move(rows)};
}

SimPopulation draw_sample(const SimPopulation& pop, std::size_t n, std::uint64_t seed) {
    const std::size_t size = pop.data.n();
    if (n == 0 || n > size)
        throw ParameterError("sample size must lie in [1, " + std::to_string(size) + "]");
    Rng rng(derive_seed(seed, stream::sample));
    std::vector<std::size_t> idx(size);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    for (std::size_t i = 0; i < n; ++i) std::swap(idx[i], idx[i + rng.index(size - i)]);
    idx.resize(n);

    auto pick = [&](const std::vector<double>& v) {
        std::vector<double> out(n);
        for (std::size_t i = 0; i < n; ++i) out[i] = v[idx[i]];
        return out;
    };
    std::vector<std::size_t> source(n);
    for (std::size_t i = 0; i < n; ++i) source[i] = pop.source_rows[idx[i]];
    return {pop.data.subset(idx), pick(pop.true_p1), pick(pop.true_p0), pick(pop.true_tau),
            pick(pop.propensity), std::move(source)};
}

void save_ground_truth(const SimPopulation& pop, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot open '" + path + "' for writing");
    csv::write_row(out, {"row", "true_p1", "true_p0", "true_tau", "propensity"});
    for (std::size_t i = 0; i < pop.true_p1.size(); ++i)
        csv::write_row(out, {std::to_string(pop.source_rows[i]), csv::format(pop.true_p1[i]),
                             csv::format(pop.true_p0[i]), csv::format(pop.true_tau[i]),
                             csv::format(pop.propensity[i])});
    if (!out) throw Error("failed writing '" + path + "'");
}

GroundTruth load_ground_truth(const std::string& path) {
    const csv::Table t = csv::read(path);
    GroundTruth g;
    const char* names[] = {"true_p1", "true_p0", "true_tau", "propensity"};
    std::vector<double>* dest[] = {&g.true_p1, &g.true_p0, &g.true_tau, &g.propensity};
    for (int k = 0; k < 4; ++k) {
        const long c = t.find(names[k]);
        if (c < 0) throw IngestionError("ground truth is missing a column", -1, names[k]);
        for (std::size_t r = 0; r < t.rows.size(); ++r)
            dest[k]->push_back(csv::parse_double(t.rows[r][static_cast<std::size_t>(c)],
                                                 static_cast<long>(r) + 2, names[k]));
    }
    return g;
}

}  // namespace itr::sim
