#include <CLI11.hpp>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <map>
#include <sstream>
#include <thread>

#include "itr/core/csv.hpp"
#include "itr/core/error.hpp"
#include "itr/core/random.hpp"
#include "itr/core/rule.hpp"
#include "itr/decision/decision.hpp"
#include "itr/eval/replication.hpp"
#include "itr/flex/bart.hpp"
#include "itr/kernels/kernels.hpp"
#include "itr/pipeline/config_io.hpp"
#include "itr/pipeline/pipeline.hpp"
#include "itr/sim/scenarios.hpp"
#include "itr/simple/export.hpp"

namespace fs = std::filesystem;
using namespace itr;
using ordered_json = nlohmann::ordered_json;

namespace {

unsigned default_jobs() {
    if (const char* env = std::getenv("ITR_JOBS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v > 0) return static_cast<unsigned>(v);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot read '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw Error("cannot open '" + path.string() + "' for writing");
    out << text;
}

// Manifest for single-stage subcommands.
struct Run {
    fs::path dir;
    RunManifest manifest;
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();

    Run(const std::string& out, ordered_json config) : dir(out) {
        fs::create_directories(dir);
        manifest.version = version_string();
        manifest.config_json = config.dump();
    }
    void artifact(const std::string& key, const std::string& file) {
        manifest.artifacts[key] = {file, file_checksum((dir / file).string())};
    }
    void finish(const std::string& stage) {
        manifest.timings_seconds[stage] =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        write_manifest(manifest, (dir / "manifest.json").string());
    }
};

struct RuleSet {
    BinaryVector assignment;
    std::vector<double> p_treat;
};

std::map<int, RuleSet> read_rules(const std::string& path) {
    const csv::Table t = csv::read(path);
    const long th = t.find("threshold"), as = t.find("assignment"), pt = t.find("p_treat");
    if (th < 0 || as < 0 || pt < 0)
        throw IngestionError("rules file needs threshold, assignment and p_treat columns");
    std::map<int, RuleSet> out;
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        const auto& row = t.rows[r];
        const long line = static_cast<long>(r) + 2;
        auto& set = out[static_cast<int>(csv::parse_long(row[static_cast<std::size_t>(th)], line, "threshold"))];
        const long a = csv::parse_long(row[static_cast<std::size_t>(as)], line, "assignment");
        if (a != 0 && a != 1) throw IngestionError("assignment must be 0 or 1", line, "assignment");
        set.assignment.push_back(static_cast<std::uint8_t>(a));
        set.p_treat.push_back(csv::parse_double(row[static_cast<std::size_t>(pt)], line, "p_treat"));
    }
    return out;
}

void require_rows(const RuleSet& set, const Dataset& data, int threshold) {
    if (set.assignment.size() != data.n())
        throw ParameterError("rules at threshold " + std::to_string(threshold) + " cover " +
                             std::to_string(set.assignment.size()) + " rows, dataset has " +
                             std::to_string(data.n()));
}

void add_bart_flags(CLI::App* cmd, std::string& profile, int& trees, int& iterations, int& burn_in) {
    cmd->add_option("--profile", profile, "Flexible-model profile")->check(CLI::IsMember({"desk", "paper"}));
    cmd->add_option("--trees", trees, "Number of trees (overrides the profile)");
    cmd->add_option("--iterations", iterations, "MCMC iterations including burn-in");
    cmd->add_option("--burn-in", burn_in, "Discarded iterations");
}

BartConfig bart_from(const std::string& profile, int trees, int iterations, int burn_in) {
    BartConfig b = profile == "paper" ? BartConfig::paper() : BartConfig::desk();
    if (trees > 0) b.num_trees = trees;
    if (iterations > 0) b.iterations = iterations;
    if (burn_in >= 0) b.burn_in = burn_in;
    b.validate();
    return b;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Loss-optimal treatment rules from a flexible Bayesian model, distilled into simple models"};
    app.require_subcommand(1);
    app.set_version_flag("--version", version_string());
    const std::vector<std::string> scenario_ids = {"A", "B", "C", "D", "E", "F", "G", "H"};

    // simulate
    auto* simulate = app.add_subcommand("simulate", "Generate a confounded sample with ground truth");
    std::string sim_scenario, sim_out;
    std::size_t sim_n = 1000, sim_pop = 10000;
    double sim_lambda = sim::kDefaultLambda;
    std::uint64_t sim_seed = ExperimentConfig{}.seed;
    bool sim_population = false;
    simulate->add_option("--scenario", sim_scenario, "Scenario id")->required()->check(CLI::IsMember(scenario_ids));
    simulate->add_option("--n", sim_n, "Sample size");
    simulate->add_option("--population-size", sim_pop, "Population size");
    simulate->add_option("--lambda", sim_lambda, "Confounding strength");
    simulate->add_option("--seed", sim_seed, "Master seed");
    simulate->add_flag("--population", sim_population, "Write the whole population instead of a sample");
    simulate->add_option("--out", sim_out, "Run directory")->required();

    // fit-flex
    auto* fit = app.add_subcommand("fit-flex", "Fit the flexible outcome model");
    std::string fit_data, fit_schema, fit_out, fit_profile = "desk";
    std::uint64_t fit_seed = ExperimentConfig{}.seed;
    bool fit_augment = false;
    int fit_trees = 0, fit_iter = 0, fit_burn = -1;
    fit->add_option("--data", fit_data, "Dataset CSV")->required();
    fit->add_option("--schema", fit_schema, "Dataset schema JSON")->required();
    fit->add_option("--seed", fit_seed, "Master seed");
    fit->add_flag("--augment-propensity", fit_augment, "Append an estimated propensity score as an input");
    add_bart_flags(fit, fit_profile, fit_trees, fit_iter, fit_burn);
    fit->add_option("--out", fit_out, "Run directory")->required();

    // derive-rules
    auto* derive = app.add_subcommand("derive-rules", "Loss-optimal assignments from a fitted model");
    std::string der_model, der_data, der_schema, der_out;
    std::vector<int> der_thresholds = ExperimentConfig{}.thresholds;
    double der_rho = 0.0;
    derive->add_option("--model", der_model, "Model file from fit-flex")->required();
    derive->add_option("--data", der_data, "Covariates to score (default: the training rows)");
    derive->add_option("--schema", der_schema, "Schema for --data");
    derive->add_option("--thresholds", der_thresholds, "Thresholds c_t/c_d in percent")->delimiter(',');
    derive->add_option("--rho", der_rho, "Potential-outcome correlation");
    derive->add_option("--out", der_out, "Run directory")->required();

    // distill
    auto* distill = app.add_subcommand("distill", "Fit simple models to the rules' soft labels");
    std::string dis_data, dis_schema, dis_rules, dis_out;
    std::vector<std::string> dis_families = {"tree", "logistic"};
    TreeConfig dis_tree;
    SgdConfig dis_sgd;
    std::uint64_t dis_seed = ExperimentConfig{}.seed;
    distill->add_option("--data", dis_data, "Dataset CSV")->required();
    distill->add_option("--schema", dis_schema, "Dataset schema JSON")->required();
    distill->add_option("--rules", dis_rules, "rules.csv from derive-rules")->required();
    distill->add_option("--family", dis_families, "Model families")->check(CLI::IsMember({"tree", "logistic"}));
    distill->add_option("--max-depth", dis_tree.max_depth, "Tree depth limit");
    distill->add_option("--min-obs", dis_tree.min_obs, "Rows each child must exceed");
    distill->add_option("--learning-rate", dis_sgd.learning_rate, "SGD step size");
    distill->add_option("--sgd-iterations", dis_sgd.iterations, "SGD passes");
    distill->add_option("--batch-size", dis_sgd.batch_size, "SGD mini-batch size");
    distill->add_option("--seed", dis_seed, "Master seed");
    distill->add_option("--out", dis_out, "Run directory")->required();

    // evaluate
    auto* evaluate = app.add_subcommand("evaluate", "Score rules against ground truth or the posterior");
    std::string ev_data, ev_schema, ev_rules, ev_truth, ev_model, ev_distilled, ev_out;
    evaluate->add_option("--data", ev_data, "Dataset CSV")->required();
    evaluate->add_option("--schema", ev_schema, "Dataset schema JSON")->required();
    evaluate->add_option("--rules", ev_rules, "rules.csv from derive-rules")->required();
    auto* truth_opt = evaluate->add_option("--ground-truth", ev_truth, "ground_truth.csv from simulate");
    auto* model_opt = evaluate->add_option("--model", ev_model, "Model file for posterior evaluation");
    truth_opt->excludes(model_opt);
    evaluate->add_option("--distilled", ev_distilled, "Run directory from distill");
    evaluate->add_option("--out", ev_out, "Run directory")->required();

    // reproduce-sim
    auto* repro = app.add_subcommand("reproduce-sim", "Run the replicate simulation study");
    std::string rep_config, rep_out;
    std::vector<std::string> rep_scenarios;
    int rep_replicates = 0;
    std::size_t rep_n = 0, rep_pop = 0;
    std::vector<int> rep_thresholds;
    std::uint64_t rep_seed = 0;
    unsigned rep_jobs = default_jobs();
    bool rep_full = false, rep_desk = false, rep_population = false;
    repro->add_option("--config", rep_config, "Experiment config JSON");
    repro->add_option("--scenario", rep_scenarios, "Scenario ids")->check(CLI::IsMember(scenario_ids));
    repro->add_option("--replicates", rep_replicates, "Replicates per scenario")->check(CLI::PositiveNumber);
    repro->add_option("--n", rep_n, "Sample size");
    repro->add_option("--population-size", rep_pop, "Population size");
    repro->add_option("--thresholds", rep_thresholds, "Thresholds in percent")->delimiter(',');
    auto* seed_opt = repro->add_option("--seed", rep_seed, "Master seed");
    repro->add_option("--jobs", rep_jobs, "Worker threads (default: $ITR_JOBS or all cores)")
        ->check(CLI::PositiveNumber);
    auto* full_flag = repro->add_flag("--full", rep_full, "Full protocol: 8 scenarios, 100 replicates, 5% grid");
    repro->add_flag("--desk", rep_desk, "Desk-scale flexible model")->excludes(full_flag);
    repro->add_flag("--score-on-population", rep_population, "Score on the whole population");
    repro->add_option("--out", rep_out, "Run directory")->required();

    // run
    auto* run = app.add_subcommand("run", "Run the full pipeline on one dataset or scenario");
    std::string run_config, run_scenario, run_out;
    std::uint64_t run_seed = 0;
    run->add_option("--config", run_config, "Experiment config JSON");
    run->add_option("--scenario", run_scenario, "Scenario id")->check(CLI::IsMember(scenario_ids));
    auto* run_seed_opt = run->add_option("--seed", run_seed, "Master seed");
    run->add_option("--out", run_out, "Run directory")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*simulate) {
            const auto s = sim::parse_scenario(sim_scenario);
            const std::uint64_t pop_seed = derive_seed(sim_seed, stream::population);
            const std::uint64_t sample_seed = derive_seed(sim_seed, stream::sample);
            Run r(sim_out, {{"scenario", sim_scenario}, {"n", sim_n}, {"population_size", sim_pop},
                            {"lambda", sim_lambda}, {"population", sim_population}});
            r.manifest.seeds = {{"master", sim_seed}, {"population", pop_seed}};
            const auto pop = sim::generate_population(s, sim_pop, pop_seed, sim_lambda);
            const auto out = sim_population ? pop : sim::draw_sample(pop, sim_n, sample_seed);
            if (!sim_population) r.manifest.seeds["sample"] = sample_seed;
            save_dataset(out.data, (r.dir / "dataset.csv").string(), (r.dir / "dataset.schema.json").string());
            sim::save_ground_truth(out, (r.dir / "ground_truth.csv").string());
            r.artifact("dataset", "dataset.csv");
            r.artifact("schema", "dataset.schema.json");
            r.artifact("ground_truth", "ground_truth.csv");
            r.finish("simulate");
        } else if (*fit) {
            const BartConfig b = bart_from(fit_profile, fit_trees, fit_iter, fit_burn);
            const Dataset data = load_dataset(fit_data, fit_schema);
            Run r(fit_out, {{"data", fit_data}, {"profile", fit_profile}, {"num_trees", b.num_trees},
                            {"iterations", b.iterations}, {"burn_in", b.burn_in}, {"augment_propensity", fit_augment}});
            r.manifest.seeds = {{"master", fit_seed}};
            save_model(fit_flex(data, b, fit_seed, fit_augment), (r.dir / "model.bin").string());
            r.artifact("model", "model.bin");
            r.finish("fit-flex");
        } else if (*derive) {
            if (der_data.empty() != der_schema.empty()) throw ParameterError("--data and --schema go together");
            for (int t : der_thresholds)
                if (t < 0 || t > 100) throw ParameterError("thresholds must be percentages in [0, 100]");
            const FittedFlexModel model = load_model(der_model);
            const Matrix x = der_data.empty() ? model.training_x() : load_dataset(der_data, der_schema).x();
            Run r(der_out, {{"model", der_model}, {"thresholds", der_thresholds}, {"rho", der_rho}});
            const PosteriorDraws draws = predict_draws(model, x);
            std::ofstream out(r.dir / "rules.csv");
            csv::write_row(out, {"threshold", "id", "assignment", "p_treat", "tau_hat_mean"});
            for (int th : der_thresholds) {
                const auto rule = optimal_rule(draws, expand_additive(AdditiveLoss::from_percent(th)), der_rho);
                for (std::size_t i = 0; i < x.rows(); ++i)
                    csv::write_row(out, {std::to_string(th), std::to_string(i), std::to_string(rule.assignments[i]),
                                         csv::format(rule.p_treat[i]), csv::format(rule.tau_mean[i])});
            }
            out.close();
            r.artifact("rules", "rules.csv");
            r.finish("derive-rules");
        } else if (*distill) {
            dis_tree.validate();
            dis_sgd.seed = derive_seed(dis_seed, stream::sgd);
            dis_sgd.validate();
            const Dataset data = load_dataset(dis_data, dis_schema);
            const auto rules = read_rules(dis_rules);
            Run r(dis_out, {{"data", dis_data}, {"rules", dis_rules}, {"families", dis_families},
                            {"max_depth", dis_tree.max_depth}, {"min_obs", dis_tree.min_obs},
                            {"learning_rate", dis_sgd.learning_rate}, {"sgd_iterations", dis_sgd.iterations},
                            {"batch_size", dis_sgd.batch_size}});
            r.manifest.seeds = {{"master", dis_seed}, {"sgd", dis_sgd.seed}};
            const bool trees = std::count(dis_families.begin(), dis_families.end(), "tree") > 0;
            const bool logistic = std::count(dis_families.begin(), dis_families.end(), "logistic") > 0;
            ordered_json tj = ordered_json::array(), lj = ordered_json::array();
            std::string text, dot;
            for (const auto& [th, set] : rules) {
                require_rows(set, data, th);
                if (trees) {
                    const auto tree = fit_soft_tree(data.x(), data.columns(), set.p_treat, dis_tree);
                    tj.push_back({{"threshold", th}, {"tree", ordered_json::parse(tree_to_json(tree))}});
                    text += "# threshold " + std::to_string(th) + "%\n" + tree_to_text(tree);
                    dot += "// threshold " + std::to_string(th) + "%\n" + tree_to_dot(tree);
                }
                if (logistic) {
                    const auto m = fit_soft_logistic(data.x(), data.columns(), set.p_treat, dis_sgd);
                    lj.push_back({{"threshold", th}, {"model", ordered_json::parse(logistic_to_json(m))}});
                }
            }
            if (trees) {
                write_file(r.dir / "trees.json", tj.dump(2) + "\n");
                write_file(r.dir / "trees.txt", text);
                write_file(r.dir / "trees.dot", dot);
                r.artifact("tree", "trees.json");
            }
            if (logistic) {
                write_file(r.dir / "logistic.json", lj.dump(2) + "\n");
                r.artifact("logistic", "logistic.json");
            }
            r.finish("distill");
        } else if (*evaluate) {
            if (ev_truth.empty() == ev_model.empty())
                throw ParameterError("give exactly one of --ground-truth or --model");
            const Dataset data = load_dataset(ev_data, ev_schema);
            const auto rules = read_rules(ev_rules);
            std::optional<sim::GroundTruth> truth;
            std::optional<PosteriorDraws> draws;
            if (!ev_truth.empty()) {
                truth = sim::load_ground_truth(ev_truth);
                if (truth->true_p1.size() != data.n()) throw ParameterError("ground truth and dataset differ in rows");
            } else {
                draws = predict_draws(load_model(ev_model), data.x());
            }
            std::map<int, SoftLabelTree> trees;
            std::map<int, LogisticModel> logistic;
            if (!ev_distilled.empty()) {
                const fs::path d(ev_distilled);
                if (fs::exists(d / "trees.json"))
                    for (const auto& e : ordered_json::parse(read_file((d / "trees.json").string())))
                        trees.emplace(e.at("threshold").get<int>(), tree_from_json(e.at("tree").dump()));
                if (fs::exists(d / "logistic.json"))
                    for (const auto& e : ordered_json::parse(read_file((d / "logistic.json").string())))
                        logistic.emplace(e.at("threshold").get<int>(), logistic_from_json(e.at("model").dump()));
            }
            Run r(ev_out, {{"data", ev_data}, {"rules", ev_rules}, {"ground_truth", ev_truth},
                           {"model", ev_model}, {"distilled", ev_distilled}});
            ReplicationReport report;
            report.replicates = 1;
            for (const auto& [th, set] : rules) {
                require_rows(set, data, th);
                const AdditiveLoss additive = AdditiveLoss::from_percent(th);
                const LossTable loss = expand_additive(additive);
                auto add = [&](const char* name, const BinaryVector& rule) {
                    RuleScore s;
                    if (truth) {
                        s = score_rule(rule, truth->true_p1, truth->true_p0,
                                       true_optimal_rule(truth->true_tau, additive), loss);
                    } else {
                        const DrawScore d = eval_against_draws(rule, *draws, loss);
                        s.R = d.R;
                        s.V = d.V;
                    }
                    report.records.push_back({truth ? "sim" : "data", 0, th, name, s});
                };
                add(kRuleOptimal, set.assignment);
                if (auto it = trees.find(th); it != trees.end())
                    add(kRuleDistilledTree, TreatmentRule(it->second).predict_all(data.x()));
                if (auto it = logistic.find(th); it != logistic.end())
                    add(kRuleDistilledLogistic, TreatmentRule(it->second).predict_all(data.x()));
                add("observed", data.t());
            }
            report.summary = summarize(report.records);
            write_report_csv(report, (r.dir / "report.csv").string());
            r.artifact("report", "report.csv");
            r.finish("evaluate");
        } else if (*repro) {
            ExperimentConfig c = rep_full ? ExperimentConfig::full() : ExperimentConfig{};
            if (!rep_config.empty()) c = load_config(rep_config, c);
            if (rep_desk) c.bart = BartConfig::desk();
            if (!rep_scenarios.empty()) c.scenarios = rep_scenarios;
            if (rep_replicates > 0) c.replications = rep_replicates;
            if (rep_n > 0) c.n = rep_n;
            if (rep_pop > 0) c.population_size = rep_pop;
            if (!rep_thresholds.empty()) c.thresholds = rep_thresholds;
            if (*seed_opt) c.seed = rep_seed;
            if (rep_population) c.score_on_population = true;
            c.validate();

            Run r(rep_out, ordered_json::parse(config_to_json(c)));
            r.manifest.seeds = {{"master", c.seed}};
            const ReplicationReport report = run_replications(c, rep_jobs);
            write_report_csv(report, (r.dir / "report.csv").string());
            write_replicates_csv(report, (r.dir / "replicates.csv").string());
            write_plot_data_csv(report, (r.dir / "plot_data.csv").string());
            r.artifact("report", "report.csv");
            r.artifact("replicates", "replicates.csv");
            r.artifact("plot_data", "plot_data.csv");
            r.finish("reproduce-sim");
            for (const auto& f : report.failures)
                std::cerr << "replicate " << f.scenario << "/" << f.replicate << " failed: " << f.message << '\n';
            std::cout << "wrote " << report.summary.size() << " summary rows ("
                      << report.records.size() << " scored rules, " << report.failures.size()
                      << " failed replicates, isa " << kernels::isa_name(kernels::active().isa) << ") to "
                      << rep_out << '\n';
        } else if (*run) {
            ExperimentConfig c;
            if (!run_config.empty()) c = load_config(run_config, c);
            if (!run_scenario.empty()) {
                c.scenarios = {run_scenario};
                c.dataset_csv.clear();
            }
            if (*run_seed_opt) c.seed = run_seed;
            const RunManifest m = run_pipeline(c, run_out);
            std::cout << "wrote " << m.artifacts.size() << " artifacts to " << run_out << '\n';
        }
    } catch (const ParameterError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
