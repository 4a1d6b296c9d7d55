#pragma once

#include <string>

#include "itr/core/config.hpp"

namespace itr {

// Reads a JSON experiment config. Missing keys keep their defaults; unknown
// keys are rejected. Example:
//   {"scenarios": ["E"], "n": 1000, "population_size": 10000, "replications": 20,
//    "thresholds": [0, 10, 20], "lambda": 1.0986, "rho": 0.0, "seed": 7,
//    "bart": {"profile": "desk", "num_trees": 50},
//    "tree": {"max_depth": 2, "min_obs": 5},
//    "sgd": {"learning_rate": 0.01, "iterations": 1000},
//    "families": ["tree", "logistic"], "augment_propensity": false}
ExperimentConfig parse_config(const std::string& json_text, ExperimentConfig base = {});
ExperimentConfig load_config(const std::string& path, ExperimentConfig base = {});
std::string config_to_json(const ExperimentConfig& config);

}  // namespace itr
