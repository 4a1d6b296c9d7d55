#include "itr/simple/export.hpp"

#include <json.hpp>
#include <sstream>

#include "itr/core/csv.hpp"
#include "itr/core/error.hpp"
#include "itr/core/rule.hpp"

namespace itr {

namespace {

using nlohmann::json;

std::string kind_name(Feature::Kind k) {
    switch (k) {
        case Feature::Kind::intercept: return "intercept";
        case Feature::Kind::value: return "value";
        case Feature::Kind::indicator: return "indicator";
    }
    return "value";
}

Feature::Kind parse_kind(const std::string& s) {
    if (s == "intercept") return Feature::Kind::intercept;
    if (s == "value") return Feature::Kind::value;
    if (s == "indicator") return Feature::Kind::indicator;
    throw ParameterError("unknown feature kind '" + s + "'");
}

json feature_json(const Feature& f) {
    return {{"name", f.name},
            {"kind", kind_name(f.kind)},
            {"column", f.column},
            {"level", f.level},
            {"times_treatment", f.times_treatment},
            {"continuous", f.continuous}};
}

Feature feature_from(const json& j) {
    Feature f;
    f.name = j.at("name").get<std::string>();
    f.kind = parse_kind(j.at("kind").get<std::string>());
    f.column = j.at("column").get<int>();
    f.level = j.value("level", 0);
    f.times_treatment = j.value("times_treatment", false);
    f.continuous = j.value("continuous", false);
    return f;
}

std::string condition(const SoftLabelTree& tree, const TreeNode& nd, bool left) {
    const Feature& f = tree.features()[static_cast<std::size_t>(nd.feature)];
    return f.name + (left ? " <= " : " > ") + csv::format(nd.cutoff);
}

void text_node(const SoftLabelTree& tree, int k, int indent, std::ostringstream& os) {
    const TreeNode& nd = tree.nodes()[static_cast<std::size_t>(k)];
    const std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
    if (nd.is_leaf()) {
        os << pad << "treat=" << decide(nd.weight) << " w=" << csv::format(nd.weight)
           << " n=" << nd.count << '\n';
        return;
    }
    os << pad << "if " << condition(tree, nd, true) << ":\n";
    text_node(tree, nd.left, indent + 1, os);
    os << pad << "else:\n";
    text_node(tree, nd.right, indent + 1, os);
}

json parse(const std::string& text) {
    try {
        return json::parse(text);
    } catch (const json::exception& e) {
        throw ParameterError(std::string("invalid model JSON: ") + e.what());
    }
}

}  // namespace

std::string tree_to_text(const SoftLabelTree& tree) {
    std::ostringstream os;
    text_node(tree, 0, 0, os);
    return os.str();
}

std::string tree_to_dot(const SoftLabelTree& tree) {
    std::ostringstream os;
    os << "digraph tree {\n  node [shape=box];\n";
    const auto& nodes = tree.nodes();
    for (std::size_t k = 0; k < nodes.size(); ++k) {
        const TreeNode& nd = nodes[k];
        os << "  n" << k << " [label=\"";
        if (nd.is_leaf())
            os << "treat=" << decide(nd.weight) << "\\nw=" << csv::format(nd.weight)
               << "\\nn=" << nd.count;
        else
            os << condition(tree, nd, true);
        os << "\"];\n";
        if (!nd.is_leaf()) {
            os << "  n" << k << " -> n" << nd.left << " [label=\"yes\"];\n";
            os << "  n" << k << " -> n" << nd.right << " [label=\"no\"];\n";
        }
    }
    os << "}\n";
    return os.str();
}

std::string tree_to_json(const SoftLabelTree& tree) {
    json j;
    j["type"] = "tree";
    j["features"] = json::array();
    for (const auto& f : tree.features()) j["features"].push_back(feature_json(f));
    j["nodes"] = json::array();
    for (const auto& nd : tree.nodes())
        j["nodes"].push_back({{"feature", nd.feature},
                              {"cutoff", nd.cutoff},
                              {"left", nd.left},
                              {"right", nd.right},
                              {"weight", nd.weight},
                              {"count", nd.count},
                              {"depth", nd.depth}});
    return j.dump(2);
}

SoftLabelTree tree_from_json(const std::string& text) {
    const json j = parse(text);
    try {
        std::vector<Feature> features;
        for (const auto& f : j.at("features")) features.push_back(feature_from(f));
        std::vector<TreeNode> nodes;
        for (const auto& n : j.at("nodes")) {
            TreeNode nd;
            nd.feature = n.at("feature").get<int>();
            nd.cutoff = n.at("cutoff").get<double>();
            nd.left = n.at("left").get<int>();
            nd.right = n.at("right").get<int>();
            nd.weight = n.at("weight").get<double>();
            nd.count = n.at("count").get<std::size_t>();
            nd.depth = n.at("depth").get<int>();
            nodes.push_back(nd);
        }
        return SoftLabelTree(std::move(features), std::move(nodes));
    } catch (const json::exception& e) {
        throw ParameterError(std::string("invalid tree JSON: ") + e.what());
    }
}

std::string logistic_to_json(const LogisticModel& model) {
    json j;
    j["type"] = "logistic";
    j["terms"] = json::array();
    for (std::size_t k = 0; k < model.basis().size(); ++k) {
        json f = feature_json(model.basis()[k]);
        f["weight"] = model.weights()[k];
        j["terms"].push_back(f);
    }
    return j.dump(2);
}

LogisticModel logistic_from_json(const std::string& text) {
    const json j = parse(text);
    try {
        std::vector<Feature> basis;
        std::vector<double> w;
        for (const auto& t : j.at("terms")) {
            basis.push_back(feature_from(t));
            w.push_back(t.at("weight").get<double>());
        }
        return LogisticModel(std::move(basis), std::move(w));
    } catch (const json::exception& e) {
        throw ParameterError(std::string("invalid logistic JSON: ") + e.what());
    }
}

}  // namespace itr
