#include "itr/pipeline/config_io.hpp"

#include <fstream>
#include <json.hpp>
#include <set>
#include <sstream>

#include "itr/core/error.hpp"

namespace itr {

namespace {

using nlohmann::json;

void only_keys(const json& j, const std::string& where, std::initializer_list<const char*> keys) {
    if (!j.is_object()) throw ParameterError(where + " must be a JSON object");
    const std::set<std::string> allowed(keys.begin(), keys.end());
    for (const auto& [k, v] : j.items())
        if (!allowed.count(k)) throw ParameterError("unknown config key '" + where + k + "'");
}

template <class T>
void read(const json& j, const char* key, T& dest, const std::string& where = "") {
    if (!j.contains(key)) return;
    try {
        dest = j.at(key).get<T>();
    } catch (const json::exception&) {
        throw ParameterError("config key '" + where + key + "' has the wrong type");
    }
}

void read_bart(const json& j, BartConfig& b) {
    only_keys(j, "bart.", {"profile", "num_trees", "base", "power", "k", "iterations", "burn_in",
                           "p_grow", "p_prune", "p_change", "min_leaf_obs"});
    if (j.contains("profile")) {
        std::string p;
        read(j, "profile", p, "bart.");
        if (p == "desk")
            b = BartConfig::desk();
        else if (p == "paper")
            b = BartConfig::paper();
        else
            throw ParameterError("unknown BART profile '" + p + "' (expected desk or paper)");
    }
    read(j, "num_trees", b.num_trees, "bart.");
    read(j, "base", b.base, "bart.");
    read(j, "power", b.power, "bart.");
    read(j, "k", b.k, "bart.");
    read(j, "iterations", b.iterations, "bart.");
    read(j, "burn_in", b.burn_in, "bart.");
    read(j, "p_grow", b.p_grow, "bart.");
    read(j, "p_prune", b.p_prune, "bart.");
    read(j, "p_change", b.p_change, "bart.");
    read(j, "min_leaf_obs", b.min_leaf_obs, "bart.");
}

}  // namespace

ExperimentConfig parse_config(const std::string& json_text, ExperimentConfig c) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& e) {
        throw ParameterError(std::string("config is not valid JSON: ") + e.what());
    }
    only_keys(j, "", {"scenarios", "dataset_csv", "dataset_schema", "n", "population_size",
                      "replications", "thresholds", "lambda", "rho", "seed", "bart", "tree", "sgd",
                      "families", "augment_propensity", "score_on_population"});
    if (j.contains("scenarios") && j["scenarios"].is_string())
        c.scenarios = {j["scenarios"].get<std::string>()};
    else
        read(j, "scenarios", c.scenarios);
    read(j, "dataset_csv", c.dataset_csv);
    read(j, "dataset_schema", c.dataset_schema);
    read(j, "n", c.n);
    read(j, "population_size", c.population_size);
    read(j, "replications", c.replications);
    read(j, "thresholds", c.thresholds);
    read(j, "lambda", c.lambda);
    read(j, "rho", c.rho);
    read(j, "seed", c.seed);
    read(j, "augment_propensity", c.augment_propensity);
    read(j, "score_on_population", c.score_on_population);
    if (j.contains("bart")) read_bart(j["bart"], c.bart);
    if (j.contains("tree")) {
        only_keys(j["tree"], "tree.", {"max_depth", "min_obs", "min_gain"});
        read(j["tree"], "max_depth", c.tree.max_depth, "tree.");
        read(j["tree"], "min_obs", c.tree.min_obs, "tree.");
        read(j["tree"], "min_gain", c.tree.min_gain, "tree.");
    }
    if (j.contains("sgd")) {
        only_keys(j["sgd"], "sgd.", {"learning_rate", "iterations", "batch_size"});
        read(j["sgd"], "learning_rate", c.sgd.learning_rate, "sgd.");
        read(j["sgd"], "iterations", c.sgd.iterations, "sgd.");
        read(j["sgd"], "batch_size", c.sgd.batch_size, "sgd.");
    }
    if (j.contains("families")) {
        std::vector<std::string> names;
        read(j, "families", names);
        c.families.clear();
        for (const auto& n : names) c.families.push_back(parse_family(n));
    }
    return c;
}

ExperimentConfig load_config(const std::string& path, ExperimentConfig base) {
    std::ifstream in(path);
    if (!in) throw ParameterError("cannot read config '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), std::move(base));
}

std::string config_to_json(const ExperimentConfig& c) {
    json j;
    j["scenarios"] = c.scenarios;
    j["dataset_csv"] = c.dataset_csv;
    j["dataset_schema"] = c.dataset_schema;
    j["n"] = c.n;
    j["population_size"] = c.population_size;
    j["replications"] = c.replications;
    j["thresholds"] = c.thresholds;
    j["lambda"] = c.lambda;
    j["rho"] = c.rho;
    j["seed"] = c.seed;
    j["bart"] = {{"num_trees", c.bart.num_trees}, {"base", c.bart.base},
                 {"power", c.bart.power},         {"k", c.bart.k},
                 {"iterations", c.bart.iterations}, {"burn_in", c.bart.burn_in},
                 {"p_grow", c.bart.p_grow},       {"p_prune", c.bart.p_prune},
                 {"p_change", c.bart.p_change},   {"min_leaf_obs", c.bart.min_leaf_obs}};
    j["tree"] = {{"max_depth", c.tree.max_depth}, {"min_obs", c.tree.min_obs}, {"min_gain", c.tree.min_gain}};
    j["sgd"] = {{"learning_rate", c.sgd.learning_rate},
                {"iterations", c.sgd.iterations},
                {"batch_size", c.sgd.batch_size}};
    j["families"] = json::array();
    for (auto f : c.families) j["families"].push_back(family_name(f));
    j["augment_propensity"] = c.augment_propensity;
    j["score_on_population"] = c.score_on_population;
    return j.dump(2);
}

}  // namespace itr
