#include "itr/core/config.hpp"

#include <cmath>

#include "itr/core/error.hpp"
#include "itr/sim/scenarios.hpp"

namespace itr {

ExperimentConfig ExperimentConfig::full() {
    ExperimentConfig c;
    c.scenarios.clear();
    for (auto s : sim::all_scenarios()) c.scenarios.push_back(std::string(1, sim::scenario_id(s)));
    c.replications = 100;
    c.thresholds.clear();
    for (int t = 0; t <= 100; t += 5) c.thresholds.push_back(t);
    c.bart = BartConfig::paper();
    return c;
}

void ExperimentConfig::validate() const {
    if (dataset_csv.empty()) {
        if (scenarios.empty()) throw ParameterError("no scenarios selected");
        for (const auto& s : scenarios) sim::parse_scenario(s);
        if (population_size < 2) throw ParameterError("population_size must be at least 2");
        if (n < 1 || n > population_size)
            throw ParameterError("n must lie in [1, population_size]");
        if (replications < 1) throw ParameterError("replications must be at least 1");
    } else if (dataset_schema.empty()) {
        throw ParameterError("dataset_schema is required with dataset_csv");
    }
    if (thresholds.empty()) throw ParameterError("no thresholds given");
    for (int t : thresholds)
        if (t < 0 || t > 100) throw ParameterError("thresholds must be percentages in [0, 100]");
    if (!std::isfinite(lambda)) throw ParameterError("lambda must be finite");
    if (!(rho >= -1.0 && rho <= 1.0)) throw ParameterError("rho must lie in [-1, 1]");
    if (families.empty()) throw ParameterError("no simple model family selected");
    bart.validate();
    tree.validate();
    sgd.validate();
}

std::string family_name(SimpleFamily f) { return f == SimpleFamily::tree ? "tree" : "logistic"; }

SimpleFamily parse_family(const std::string& name) {
    if (name == "tree") return SimpleFamily::tree;
    if (name == "logistic") return SimpleFamily::logistic;
    throw ParameterError("unknown model family '" + name + "' (expected tree or logistic)");
}

}  // namespace itr
