#include "itr/pipeline/pipeline.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <json.hpp>

#include "itr/core/csv.hpp"
#include "itr/core/error.hpp"
#include "itr/core/random.hpp"
#include "itr/core/rule.hpp"
#include "itr/decision/decision.hpp"
#include "itr/eval/replication.hpp"
#include "itr/flex/bart.hpp"
#include "itr/pipeline/config_io.hpp"
#include "itr/sim/scenarios.hpp"
#include "itr/simple/direct.hpp"
#include "itr/simple/export.hpp"

namespace itr {

namespace fs = std::filesystem;

std::string version_string() { return "itrdistill 1.0.0"; }

std::string file_checksum(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot read '" + path + "'");
    std::uint64_t h = 0xcbf29ce484222325ULL;
    char buf[1 << 16];
    while (in.read(buf, sizeof buf) || in.gcount() > 0) {
        for (std::streamsize k = 0; k < in.gcount(); ++k) {
            h ^= static_cast<unsigned char>(buf[k]);
            h *= 0x100000001b3ULL;
        }
    }
    char hex[17];
    std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(h));
    return hex;
}

void write_manifest(const RunManifest& m, const std::string& path) {
    nlohmann::ordered_json j;
    j["version"] = m.version;
    j["config"] = nlohmann::ordered_json::parse(m.config_json.empty() ? "{}" : m.config_json);
    j["seeds"] = m.seeds;
    j["artifacts"] = nlohmann::ordered_json::object();
    for (const auto& [k, a] : m.artifacts) j["artifacts"][k] = {{"path", a.path}, {"checksum", a.checksum}};
    j["timings_seconds"] = m.timings_seconds;
    if (!m.failed_stage.empty()) j["failed_stage"] = m.failed_stage;
    std::ofstream out(path);
    if (!out) throw Error("cannot open '" + path + "' for writing");
    out << j.dump(2) << '\n';
}

namespace {

std::string write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw Error("cannot open '" + path.string() + "' for writing");
    out << text;
    if (!out) throw Error("failed writing '" + path.string() + "'");
    return path.string();
}

struct Stages {
    RunManifest& manifest;
    fs::path dir;

    template <class F>
    void run(const std::string& name, F&& body) {
        const auto t0 = std::chrono::steady_clock::now();
        try {
            body();
        } catch (...) {
            manifest.failed_stage = name;
            write_manifest(manifest, (dir / "manifest.json").string());
            throw;
        }
        manifest.timings_seconds[name] =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }

    void record(const std::string& key, const std::string& file) {
        manifest.artifacts[key] = {file, file_checksum((dir / file).string())};
    }
};

}  // namespace

RunManifest run_pipeline(const ExperimentConfig& config, const std::string& run_dir) {
    config.validate();
    const fs::path dir(run_dir);
    fs::create_directories(dir);

    RunManifest manifest;
    manifest.version = version_string();
    manifest.config_json = config_to_json(config);
    Stages stages{manifest, dir};

    const bool simulated = config.dataset_csv.empty();
    const std::uint64_t pop_seed = derive_seed(config.seed, stream::population);
    const std::uint64_t sample_seed = derive_seed(config.seed, stream::sample);
    const std::uint64_t model_seed = derive_seed(config.seed, stream::outcome_model);
    const std::uint64_t sgd_seed = derive_seed(config.seed, stream::sgd);
    manifest.seeds = {{"master", config.seed}, {"model", model_seed}, {"sgd", sgd_seed}};
    if (simulated) {
        manifest.seeds["population"] = pop_seed;
        manifest.seeds["sample"] = sample_seed;
    }

    std::optional<Dataset> data;
    std::optional<sim::SimPopulation> sample;
    std::string scenario;
    stages.run("dataset", [&] {
        if (simulated) {
            scenario = config.scenarios.front();
            const auto pop = sim::generate_population(sim::parse_scenario(scenario), config.population_size,
                                                      pop_seed, config.lambda);
            sample = sim::draw_sample(pop, config.n, sample_seed);
            data = sample->data;
            sim::save_ground_truth(*sample, (dir / "ground_truth.csv").string());
        } else {
            data = load_dataset(config.dataset_csv, config.dataset_schema);
        }
        save_dataset(*data, (dir / "dataset.csv").string(), (dir / "dataset.schema.json").string());
        stages.record("dataset", "dataset.csv");
    });

    std::optional<FittedFlexModel> model;
    stages.run("model", [&] {
        model = fit_flex(*data, config.bart, model_seed, config.augment_propensity);
        save_model(*model, (dir / "model.bin").string());
        stages.record("model", "model.bin");
    });

    std::optional<PosteriorDraws> draws;
    std::vector<RuleDistribution> rules;
    stages.run("rules", [&] {
        draws = predict_draws(*model, data->x());
        std::ofstream out(dir / "rules.csv");
        csv::write_row(out, {"threshold", "id", "assignment", "p_treat", "tau_hat_mean"});
        for (int th : config.thresholds) {
            rules.push_back(optimal_rule(*draws, expand_additive(AdditiveLoss::from_percent(th)), config.rho));
            const auto& r = rules.back();
            for (std::size_t i = 0; i < data->n(); ++i)
                csv::write_row(out, {std::to_string(th), std::to_string(i), std::to_string(r.assignments[i]),
                                     csv::format(r.p_treat[i]), csv::format(r.tau_mean[i])});
        }
        out.close();
        if (!out) throw Error("failed writing rules.csv");
        stages.record("rules", "rules.csv");
    });

    SgdConfig sgd = config.sgd;
    sgd.seed = sgd_seed;
    const bool trees = std::count(config.families.begin(), config.families.end(), SimpleFamily::tree) > 0;
    const bool logistic =
        std::count(config.families.begin(), config.families.end(), SimpleFamily::logistic) > 0;
    std::vector<std::optional<SoftLabelTree>> fitted_trees(rules.size());
    std::vector<std::optional<LogisticModel>> fitted_logistic(rules.size());
    stages.run("distill", [&] {
        nlohmann::ordered_json tree_json = nlohmann::ordered_json::array();
        nlohmann::ordered_json logistic_json = nlohmann::ordered_json::array();
        std::string text, dot;
        for (std::size_t k = 0; k < rules.size(); ++k) {
            const int th = config.thresholds[k];
            if (trees) {
                fitted_trees[k] = fit_soft_tree(data->x(), data->columns(), rules[k].p_treat, config.tree);
                tree_json.push_back({{"threshold", th},
                                     {"tree", nlohmann::ordered_json::parse(tree_to_json(*fitted_trees[k]))}});
                text += "# threshold " + std::to_string(th) + "%\n" + tree_to_text(*fitted_trees[k]);
                dot += "// threshold " + std::to_string(th) + "%\n" + tree_to_dot(*fitted_trees[k]);
            }
            if (logistic) {
                fitted_logistic[k] = fit_soft_logistic(data->x(), data->columns(), rules[k].p_treat, sgd);
                logistic_json.push_back(
                    {{"threshold", th},
                     {"model", nlohmann::ordered_json::parse(logistic_to_json(*fitted_logistic[k]))}});
            }
        }
        write_text(dir / "trees.json", tree_json.dump(2) + "\n");
        write_text(dir / "trees.txt", text);
        write_text(dir / "trees.dot", dot);
        if (logistic) write_text(dir / "logistic.json", logistic_json.dump(2) + "\n");
        stages.record("tree", "trees.json");
    });

    stages.run("report", [&] {
        std::optional<SoftLabelTree> direct_tree;
        std::optional<LogisticModel> direct_logistic;
        if (trees) direct_tree = fit_direct_tree(*data, config.tree);
        if (logistic) direct_logistic = fit_direct_logistic(*data, sgd);
        const std::string label = simulated ? scenario : "data";
        std::vector<ReplicateRecord> records;
        for (std::size_t k = 0; k < rules.size(); ++k) {
            const int th = config.thresholds[k];
            const AdditiveLoss additive = AdditiveLoss::from_percent(th);
            const LossTable loss = expand_additive(additive);
            BinaryVector truth;
            if (simulated) truth = true_optimal_rule(sample->true_tau, additive);
            auto add = [&](const char* name, const BinaryVector& rule) {
                RuleScore s;
                if (simulated) {
                    s = score_rule(rule, sample->true_p1, sample->true_p0, truth, loss);
                } else {
                    const DrawScore d = eval_against_draws(rule, *draws, loss);
                    s.R = d.R;
                    s.V = d.V;
                }
                records.push_back({label, 0, th, name, s});
            };
            add(kRuleOptimal, rules[k].assignments);
            if (trees) {
                add(kRuleDistilledTree, TreatmentRule(*fitted_trees[k]).predict_all(data->x()));
                add(kRuleDirectTree, direct_rule(*direct_tree, data->x(), loss, config.rho));
            }
            if (logistic) {
                add(kRuleDistilledLogistic, TreatmentRule(*fitted_logistic[k]).predict_all(data->x()));
                add(kRuleDirectLogistic, direct_rule(*direct_logistic, data->x(), loss, config.rho));
            }
            if (!simulated) add("observed", data->t());
        }
        ReplicationReport report;
        report.records = std::move(records);
        report.replicates = 1;
        report.summary = summarize(report.records);
        write_report_csv(report, (dir / "report.csv").string());
        stages.record("report", "report.csv");
    });

    write_manifest(manifest, (dir / "manifest.json").string());
    return manifest;
}

}  // namespace itr
