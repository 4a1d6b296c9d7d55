#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "itr/flex/bart_config.hpp"
#include "itr/simple/config.hpp"

namespace itr {

enum class SimpleFamily { tree, logistic };

struct ExperimentConfig {
    // Simulation scenarios by id ("A".."H"). Ignored when dataset_csv is set.
    std::vector<std::string> scenarios = {"A", "E", "F"};
    // Observational dataset for single pipeline runs.
    std::string dataset_csv;
    std::string dataset_schema;

    std::size_t n = 1000;
    std::size_t population_size = 10000;
    int replications = 20;
    // Decision thresholds c_t / c_d in whole percent.
    std::vector<int> thresholds = {0, 10, 20, 30, 40, 50, 60, 70, 80, 90, 100};
    double lambda = 1.0986122886681098;  // log 3
    double rho = 0.0;

    BartConfig bart = BartConfig::desk();
    TreeConfig tree;
    SgdConfig sgd;
    std::vector<SimpleFamily> families = {SimpleFamily::tree, SimpleFamily::logistic};
    bool augment_propensity = false;
    // Score rules on the whole population instead of the drawn sample.
    bool score_on_population = false;

    std::uint64_t seed = 20240601;

    // Paper protocol: 8 scenarios, 100 replicates, thresholds 0..100 step 5, full-size ensemble.
    static ExperimentConfig full();

    // Throws ParameterError on the first violated constraint.
    void validate() const;
};

std::string family_name(SimpleFamily f);
SimpleFamily parse_family(const std::string& name);

}  // namespace itr
