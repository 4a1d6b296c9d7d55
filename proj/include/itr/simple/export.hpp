#pragma once

#include <string>

#include "itr/simple/logistic.hpp"
#include "itr/simple/soft_tree.hpp"

namespace itr {

// Indented text: split conditions, then each leaf's decision, weight and count.
std::string tree_to_text(const SoftLabelTree& tree);
// Graphviz digraph.
std::string tree_to_dot(const SoftLabelTree& tree);

std::string tree_to_json(const SoftLabelTree& tree);
SoftLabelTree tree_from_json(const std::string& text);

std::string logistic_to_json(const LogisticModel& model);
LogisticModel logistic_from_json(const std::string& text);

}  // namespace itr
