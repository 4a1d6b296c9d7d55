#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "itr/core/dataset.hpp"
#include "itr/core/matrix.hpp"

namespace itr::sim {

// Covariate layout: X_A..X_E binary, X_a..X_e ordinal on {1,2,3,4},
// X_Ca and X_Cb standard normal.
enum Col : std::size_t {
    XA, XB, XC, XD, XE,
    Xa, Xb, Xc, Xd, Xe,
    XCa, XCb,
    kNumCols
};

std::vector<ColumnSpec> covariate_schema();

enum class Scenario { A, B, C, D, E, F, G, H };

Scenario parse_scenario(const std::string& id);  // throws ParameterError
char scenario_id(Scenario s);
std::vector<Scenario> all_scenarios();

inline const double kDefaultLambda = std::log(3.0);

Matrix sample_covariates(std::size_t n, std::uint64_t seed);

// logit f(x, t) for the scenario.
double true_logit(Scenario s, std::span<const double> x, int t);
double true_logit(const std::string& scenario, std::span<const double> x, int t);

// expit(logit(x, 1)) - expit(logit(x, 0))
double true_cate(Scenario s, std::span<const double> x);

// expit(lambda (tau_i - mean) / sd) with the sample standard deviation.
// Throws DegenerateCate when sd is zero.
std::vector<double> propensity(std::span<const double> tau, double lambda);

struct SimPopulation {
    Dataset data;
    std::vector<double> true_p1;
    std::vector<double> true_p0;
    std::vector<double> true_tau;
    std::vector<double> propensity;
    // Row indices into the population this sample was drawn from (identity for a population).
    std::vector<std::size_t> source_rows;
};

// Covariates, outcome probabilities, confounded treatment and outcome draws.
// Falls back to a constant 0.5 propensity when the CATE has no spread.
SimPopulation generate_population(Scenario s, std::size_t population_size, std::uint64_t seed,
                                  double lambda = kDefaultLambda);

// Simple random sample without replacement, carrying the ground truth along.
SimPopulation draw_sample(const SimPopulation& population, std::size_t n, std::uint64_t seed);

// CSV with columns row, true_p1, true_p0, true_tau, propensity.
void save_ground_truth(const SimPopulation& pop, const std::string& path);

struct GroundTruth {
    std::vector<double> true_p1;
    std::vector<double> true_p0;
    std::vector<double> true_tau;
    std::vector<double> propensity;
};
GroundTruth load_ground_truth(const std::string& path);

}  // namespace itr::sim
