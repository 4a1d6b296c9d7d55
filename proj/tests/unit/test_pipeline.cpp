#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "itr/core/error.hpp"
#include "itr/pipeline/config_io.hpp"
#include "itr/pipeline/pipeline.hpp"

using namespace itr;
namespace fs = std::filesystem;

namespace {

ExperimentConfig quick() {
    ExperimentConfig c;
    c.scenarios = {"E"};
    c.n = 150;
    c.population_size = 600;
    c.thresholds = {0, 20};
    c.bart.num_trees = 10;
    c.bart.iterations = 120;
    c.bart.burn_in = 20;
    c.sgd.iterations = 20;
    return c;
}

fs::path fresh(const std::string& name) {
    const auto p = fs::temp_directory_path() / ("itr_unit_" + name);
    fs::remove_all(p);
    return p;
}

}  // namespace

TEST_CASE("pipeline writes five tracked artifacts") {
    const auto dir = fresh("pipe1");
    const auto m = run_pipeline(quick(), dir.string());
    CHECK(m.failed_stage.empty());
    REQUIRE(m.artifacts.size() == 5);
    for (const char* key : {"dataset", "model", "rules", "tree", "report"}) {
        REQUIRE(m.artifacts.count(key) == 1);
        const auto path = dir / m.artifacts.at(key).path;
        CHECK(fs::exists(path));
        CHECK(file_checksum(path.string()) == m.artifacts.at(key).checksum);
    }
    CHECK(fs::exists(dir / "manifest.json"));
    const auto j = nlohmann::json::parse(std::ifstream(dir / "manifest.json"));
    CHECK(j.at("version") == version_string());
    CHECK(j.at("artifacts").size() == 5);
}

TEST_CASE("pipeline reruns reproduce every checksum") {
    const auto a = run_pipeline(quick(), fresh("pipe2a").string());
    const auto b = run_pipeline(quick(), fresh("pipe2b").string());
    for (const auto& [k, v] : a.artifacts) CHECK(b.artifacts.at(k).checksum == v.checksum);
}

TEST_CASE("a failing stage is recorded in the manifest") {
    auto cfg = quick();
    cfg.dataset_csv = "/nonexistent/data.csv";
    cfg.dataset_schema = "/nonexistent/data.json";
    const auto dir = fresh("pipe3");
    CHECK_THROWS_AS(run_pipeline(cfg, dir.string()), Error);
    const auto j = nlohmann::json::parse(std::ifstream(dir / "manifest.json"));
    CHECK(j.at("failed_stage") == "dataset");
}

TEST_CASE("invalid thresholds are rejected before any work") {
    auto cfg = quick();
    cfg.thresholds = {10, 120};
    const auto dir = fresh("pipe4");
    CHECK_THROWS_AS(run_pipeline(cfg, dir.string()), ParameterError);
    CHECK(!fs::exists(dir / "model.bin"));
}

TEST_CASE("config files") {
    const auto c = parse_config(R"({"scenarios": "F", "n": 500, "thresholds": [0, 5],
                                    "bart": {"profile": "paper", "num_trees": 30},
                                    "tree": {"max_depth": 3}, "sgd": {"learning_rate": 0.05},
                                    "families": ["logistic"], "seed": 11})");
    CHECK(c.scenarios == std::vector<std::string>{"F"});
    CHECK(c.n == 500);
    CHECK(c.thresholds == std::vector<int>{0, 5});
    CHECK(c.bart.num_trees == 30);
    CHECK(c.bart.iterations == 1100);
    CHECK(c.tree.max_depth == 3);
    CHECK(c.sgd.learning_rate == 0.05);
    CHECK(c.families == std::vector<SimpleFamily>{SimpleFamily::logistic});
    CHECK(c.seed == 11);

    CHECK_THROWS_AS(parse_config(R"({"scenarioz": ["E"]})"), ParameterError);
    CHECK_THROWS_AS(parse_config(R"({"bart": {"trees": 3}})"), ParameterError);
    CHECK_THROWS_AS(parse_config("{not json"), ParameterError);

    const auto back = parse_config(config_to_json(c));
    CHECK(config_to_json(back) == config_to_json(c));
}

TEST_CASE("full protocol settings") {
    const auto f = ExperimentConfig::full();
    CHECK(f.scenarios.size() == 8);
    CHECK(f.replications == 100);
    CHECK(f.thresholds.size() == 21);
    CHECK(f.thresholds.back() == 100);
    CHECK(f.bart == BartConfig::paper());
}
