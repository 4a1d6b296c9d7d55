#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "itr/eval/replication.hpp"

using namespace itr;

namespace {

ExperimentConfig tiny() {
    ExperimentConfig c;
    c.scenarios = {"E"};
    c.n = 120;
    c.population_size = 600;
    c.replications = 2;
    c.thresholds = {0, 30};
    c.bart.num_trees = 10;
    c.bart.iterations = 120;
    c.bart.burn_in = 20;
    c.sgd.iterations = 20;
    c.seed = 99;
    return c;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

bool same_records(const ReplicateRecord& a, const ReplicateRecord& b) {
    return a.scenario == b.scenario && a.replicate == b.replicate && a.threshold == b.threshold &&
           a.rule == b.rule && a.score.R == b.score.R && a.score.V == b.score.V &&
           a.score.accuracy == b.score.accuracy && a.score.precision == b.score.precision &&
           a.score.recall == b.score.recall;
}

}  // namespace

TEST_CASE("replicates score every rule at every threshold") {
    const auto recs = run_replicate(tiny(), "E", 0);
    CHECK(recs.size() == 2 * 5);
    for (const auto& r : recs) {
        CHECK(r.score.R >= 0);
        CHECK(r.score.V >= 0);
        CHECK(r.score.V <= 1);
        CHECK(r.score.accuracy.has_value());
    }
}

TEST_CASE("reports do not depend on the worker count") {
    const auto a = run_replications(tiny(), 1);
    const auto b = run_replications(tiny(), 3);
    REQUIRE(a.records.size() == b.records.size());
    for (std::size_t i = 0; i < a.records.size(); ++i) CHECK(same_records(a.records[i], b.records[i]));
    CHECK(a.failures.empty());
    const auto dir = std::filesystem::temp_directory_path();
    write_report_csv(a, (dir / "itr_unit_a.csv").string());
    write_report_csv(b, (dir / "itr_unit_b.csv").string());
    CHECK(slurp(dir / "itr_unit_a.csv") == slurp(dir / "itr_unit_b.csv"));
    CHECK(slurp(dir / "itr_unit_a.csv").rfind("scenario,threshold,rule,metric,mean,se,n_defined\n", 0) == 0);
}

TEST_CASE("adding replicates keeps the earlier ones") {
    auto cfg = tiny();
    const auto a = run_replications(cfg, 1);
    cfg.replications = 4;
    const auto b = run_replications(cfg, 2);
    REQUIRE(b.records.size() == 2 * a.records.size());
    for (std::size_t i = 0; i < a.records.size(); ++i) CHECK(same_records(a.records[i], b.records[i]));
}

TEST_CASE("a single replicate has no standard errors") {
    auto cfg = tiny();
    cfg.replications = 1;
    const auto rep = run_replications(cfg, 1);
    for (const auto& s : rep.summary) CHECK(!s.se);
    const auto dir = std::filesystem::temp_directory_path();
    write_plot_data_csv(rep, (dir / "itr_unit_plot.csv").string());
    write_replicates_csv(rep, (dir / "itr_unit_reps.csv").string());
    CHECK(slurp(dir / "itr_unit_plot.csv").find("optimal_mean") != std::string::npos);
}

TEST_CASE("failed replicates are recorded") {
    auto cfg = tiny();
    cfg.n = 8;  // below the flexible model's minimum
    const auto rep = run_replications(cfg, 1);
    CHECK(rep.records.empty());
    REQUIRE(rep.failures.size() == 2);
    CHECK(!rep.failures[0].message.empty());
}
