#include "itr/eval/replication.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <map>
#include <thread>
#include <tuple>

#include "itr/core/csv.hpp"
#include "itr/core/error.hpp"
#include "itr/core/random.hpp"
#include "itr/core/rule.hpp"
#include "itr/decision/decision.hpp"
#include "itr/flex/bart.hpp"
#include "itr/sim/scenarios.hpp"
#include "itr/simple/direct.hpp"
#include "itr/simple/logistic.hpp"
#include "itr/simple/soft_tree.hpp"

namespace itr {

namespace {

int rule_rank(const std::string& rule) {
    static const char* order[] = {kRuleOptimal, kRuleDistilledTree, kRuleDirectTree,
                                  kRuleDistilledLogistic, kRuleDirectLogistic};
    for (int k = 0; k < 5; ++k)
        if (rule == order[k]) return k;
    return 5;
}

std::uint64_t scenario_tag(const std::string& scenario) {
    return 0x5C00u + static_cast<std::uint64_t>(sim::scenario_id(sim::parse_scenario(scenario)));
}

BinaryVector decisions(const TreatmentRule& rule, const Matrix& x) { return rule.predict_all(x); }

}  // namespace

std::vector<ReplicateRecord> run_replicate(const ExperimentConfig& config,
                                           const std::string& scenario, int replicate) {
    const sim::Scenario s = sim::parse_scenario(scenario);
    const std::uint64_t tag = scenario_tag(scenario);
    const std::uint64_t pop_seed = derive_seed(derive_seed(config.seed, stream::population), tag);
    const std::uint64_t rep_seed =
        derive_seed(replicate_seed(config.seed, static_cast<std::uint64_t>(replicate)), tag);

    const sim::SimPopulation pop = sim::generate_population(s, config.population_size, pop_seed, config.lambda);
    const sim::SimPopulation sample = sim::draw_sample(pop, config.n, rep_seed);
    const Dataset& data = sample.data;
    const sim::SimPopulation& target = config.score_on_population ? pop : sample;
    const Matrix& x_eval = target.data.x();

    const FittedFlexModel flex = fit_flex(data, config.bart, rep_seed, config.augment_propensity);
    const PosteriorDraws draws = predict_draws(flex, data.x());
    std::optional<PosteriorDraws> eval_draws;
    if (config.score_on_population) eval_draws = predict_draws(flex, x_eval);

    SgdConfig sgd = config.sgd;
    sgd.seed = derive_seed(rep_seed, stream::sgd);
    const bool trees = std::count(config.families.begin(), config.families.end(), SimpleFamily::tree) > 0;
    const bool logistic =
        std::count(config.families.begin(), config.families.end(), SimpleFamily::logistic) > 0;
    std::optional<SoftLabelTree> direct_tree;
    std::optional<LogisticModel> direct_logistic;
    if (trees) direct_tree = fit_direct_tree(data, config.tree);
    if (logistic) direct_logistic = fit_direct_logistic(data, sgd);

    std::vector<ReplicateRecord> out;
    for (int th : config.thresholds) {
        const AdditiveLoss additive = AdditiveLoss::from_percent(th);
        const LossTable loss = expand_additive(additive);
        const BinaryVector truth = true_optimal_rule(target.true_tau, additive);
        auto add = [&](const char* name, const BinaryVector& rule) {
            out.push_back({scenario, replicate, th, name,
                           score_rule(rule, target.true_p1, target.true_p0, truth, loss)});
        };

        const RuleDistribution opt = optimal_rule(draws, loss, config.rho);
        add(kRuleOptimal, eval_draws ? optimal_rule(*eval_draws, loss, config.rho).assignments
                                     : opt.assignments);
        if (trees) {
            const auto tree = fit_soft_tree(data.x(), data.columns(), opt.p_treat, config.tree);
            add(kRuleDistilledTree, decisions(TreatmentRule(tree), x_eval));
            add(kRuleDirectTree, direct_rule(*direct_tree, x_eval, loss, config.rho));
        }
        if (logistic) {
            const auto model = fit_soft_logistic(data.x(), data.columns(), opt.p_treat, sgd);
            add(kRuleDistilledLogistic, decisions(TreatmentRule(model), x_eval));
            add(kRuleDirectLogistic, direct_rule(*direct_logistic, x_eval, loss, config.rho));
        }
    }
    return out;
}

ReplicationReport run_replications(const ExperimentConfig& config, unsigned jobs) {
    config.validate();
    if (!config.dataset_csv.empty())
        throw ParameterError("replication studies run on simulated scenarios only");

    struct Job {
        std::string scenario;
        int replicate;
        std::vector<ReplicateRecord> records;
        std::optional<std::string> error;
    };
    std::vector<Job> work;
    for (const auto& s : config.scenarios)
        for (int r = 0; r < config.replications; ++r) work.push_back({s, r, {}, {}});

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t k; (k = next.fetch_add(1)) < work.size();) {
            Job& j = work[k];
            try {
                j.records = run_replicate(config, j.scenario, j.replicate);
            } catch (const std::exception& e) {
                j.error = e.what();
            }
        }
    };
    const unsigned threads = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(work.size())));
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    ReplicationReport report;
    report.replicates = static_cast<std::size_t>(config.replications);
    for (auto& j : work) {
        if (j.error)
            report.failures.push_back({j.scenario, j.replicate, *j.error});
        else
            report.records.insert(report.records.end(), j.records.begin(), j.records.end());
    }
    std::stable_sort(report.records.begin(), report.records.end(),
                     [](const ReplicateRecord& a, const ReplicateRecord& b) {
                         return std::tuple(a.scenario, a.replicate, a.threshold, rule_rank(a.rule)) <
                                std::tuple(b.scenario, b.replicate, b.threshold, rule_rank(b.rule));
                     });
    report.summary = summarize(report.records);
    return report;
}

namespace {

std::optional<double> metric(const RuleScore& s, int k) {
    switch (k) {
        case 0: return s.R;
        case 1: return s.V;
        case 2: return s.accuracy;
        case 3: return s.precision;
        case 4: return s.recall;
    }
    return std::nullopt;
}

std::string opt_text(const std::optional<double>& v) { return v ? csv::format(*v) : std::string(); }

void open_for_write(std::ofstream& out, const std::string& path) {
    out.open(path);
    if (!out) throw Error("cannot open '" + path + "' for writing");
}

}  // namespace

std::vector<SummaryRow> summarize(const std::vector<ReplicateRecord>& records) {
    using Key = std::tuple<std::string, int, int>;
    std::map<Key, std::pair<std::string, std::vector<const ReplicateRecord*>>> groups;
    for (const auto& r : records) {
        auto& g = groups[{r.scenario, r.threshold, rule_rank(r.rule)}];
        g.first = r.rule;
        g.second.push_back(&r);
    }
    std::vector<SummaryRow> out;
    for (const auto& [key, group] : groups) {
        for (int k = 0; k < 5; ++k) {
            std::vector<double> vals;
            for (const auto* r : group.second)
                if (auto v = metric(r->score, k)) vals.push_back(*v);
            SummaryRow row{std::get<0>(key), std::get<1>(key), group.first, kMetrics[k], 0.0, {}, vals.size()};
            if (!vals.empty()) {
                double s = 0.0;
                for (double v : vals) s += v;
                row.mean = s / static_cast<double>(vals.size());
            }
            if (vals.size() >= 2) {
                double ss = 0.0;
                for (double v : vals) ss += (v - row.mean) * (v - row.mean);
                const double m = static_cast<double>(vals.size());
                row.se = std::sqrt(ss / (m - 1.0)) / std::sqrt(m);
            }
            out.push_back(row);
        }
    }
    return out;
}

void write_report_csv(const ReplicationReport& report, const std::string& path) {
    std::ofstream out;
    open_for_write(out, path);
    csv::write_row(out, {"scenario", "threshold", "rule", "metric", "mean", "se", "n_defined"});
    for (const auto& r : report.summary)
        csv::write_row(out, {r.scenario, std::to_string(r.threshold), r.rule, r.metric,
                             r.n_defined ? csv::format(r.mean) : std::string(), opt_text(r.se),
                             std::to_string(r.n_defined)});
    if (!out) throw Error("failed writing '" + path + "'");
}

void write_replicates_csv(const ReplicationReport& report, const std::string& path) {
    std::ofstream out;
    open_for_write(out, path);
    csv::write_row(out, {"scenario", "replicate", "threshold", "rule", "R", "V", "accuracy",
                         "precision", "recall"});
    for (const auto& r : report.records)
        csv::write_row(out, {r.scenario, std::to_string(r.replicate), std::to_string(r.threshold), r.rule,
                             csv::format(r.score.R), csv::format(r.score.V), opt_text(r.score.accuracy),
                             opt_text(r.score.precision), opt_text(r.score.recall)});
    for (const auto& f : report.failures)
        csv::write_row(out, {f.scenario, std::to_string(f.replicate), "", "failed", "", "", "", "", ""});
    if (!out) throw Error("failed writing '" + path + "'");
}

void write_plot_data_csv(const ReplicationReport& report, const std::string& path) {
    std::vector<std::string> rules;
    for (const auto& r : report.summary)
        if (std::find(rules.begin(), rules.end(), r.rule) == rules.end()) rules.push_back(r.rule);
    std::sort(rules.begin(), rules.end(),
              [](const std::string& a, const std::string& b) { return rule_rank(a) < rule_rank(b); });

    using Key = std::tuple<std::string, int, int>;  // scenario, metric index, threshold
    std::map<Key, std::map<std::string, const SummaryRow*>> cells;
    for (const auto& r : report.summary) {
        const int m = static_cast<int>(std::find_if(std::begin(kMetrics), std::end(kMetrics),
                                                    [&](const char* k) { return r.metric == k; }) -
                                       std::begin(kMetrics));
        cells[{r.scenario, m, r.threshold}][r.rule] = &r;
    }

    std::ofstream out;
    open_for_write(out, path);
    std::vector<std::string> header = {"scenario", "metric", "threshold"};
    for (const auto& r : rules) {
        header.push_back(r + "_mean");
        header.push_back(r + "_se");
    }
    csv::write_row(out, header);
    for (const auto& [key, row] : cells) {
        std::vector<std::string> f = {std::get<0>(key), kMetrics[std::get<1>(key)],
                                      std::to_string(std::get<2>(key))};
        for (const auto& r : rules) {
            const auto it = row.find(r);
            const SummaryRow* s = it == row.end() ? nullptr : it->second;
            f.push_back(s && s->n_defined ? csv::format(s->mean) : std::string());
            f.push_back(s ? opt_text(s->se) : std::string());
        }
        csv::write_row(out, f);
    }
    if (!out) throw Error("failed writing '" + path + "'");
}

}  // namespace itr
