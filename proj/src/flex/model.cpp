#include <cstring>
#include <fstream>
#include <json.hpp>

#include "itr/core/error.hpp"
#include "itr/core/random.hpp"
#include "itr/flex/bart.hpp"

namespace itr {

FittedFlexModel::FittedFlexModel(std::vector<ColumnSpec> columns, std::string treatment_name,
                                 std::string outcome_name, BartConfig config, std::uint64_t seed,
                                 std::vector<Feature> outcome_inputs, ProbitForest outcome,
                                 std::vector<Feature> propensity_inputs,
                                 std::optional<ProbitForest> propensity, Matrix training_x)
    : columns_(std::move(columns)),
      treatment_name_(std::move(treatment_name)),
      outcome_name_(std::move(outcome_name)),
      config_(config),
      seed_(seed),
      outcome_inputs_(std::move(outcome_inputs)),
      outcome_(std::move(outcome)),
      propensity_inputs_(std::move(propensity_inputs)),
      propensity_(std::move(propensity)),
      training_x_(std::move(training_x)) {
    if (outcome_inputs_.size() != outcome_.input_width())
        throw ParameterError("outcome forest width differs from its input features");
    if (propensity_ && propensity_inputs_.size() != propensity_->input_width())
        throw ParameterError("propensity forest width differs from its input features");
}

namespace {

void check_columns(const FittedFlexModel& model, const Matrix& x) {
    if (x.cols() != model.columns().size())
        throw PredictionError("model expects " + std::to_string(model.columns().size()) +
                              " covariates, got " + std::to_string(x.cols()));
    try {
        validate_covariates(model.columns(), x);
    } catch (const IngestionError& e) {
        throw PredictionError(e.what());
    }
}

Feature propensity_feature(std::size_t p) {
    Feature f{"e(x)", Feature::Kind::value, static_cast<int>(p) + 1};
    f.continuous = true;
    return f;
}

// Raw outcome-model rows: covariates, T, then e(x) when augmented.
Matrix outcome_raw(const Matrix& x, std::span<const double> t, std::span<const double> e) {
    Matrix raw = append_column(x, t);
    return e.empty() ? raw : append_column(raw, e);
}

}  // namespace

std::vector<double> FittedFlexModel::propensity_scores(const Matrix& x) const {
    if (!propensity_) throw ParameterError("model was fit without propensity augmentation");
    check_columns(*this, x);
    return propensity_->mean_probability(evaluate_features(propensity_inputs_, x));
}

FittedFlexModel fit_flex(const Dataset& data, const BartConfig& config, std::uint64_t seed,
                         bool augment_with_propensity) {
    config.validate();
    if (data.n() < 2 * config.min_leaf_obs)
        throw InsufficientData("need at least " + std::to_string(2 * config.min_leaf_obs) + " rows");
    std::vector<double> t(data.t().begin(), data.t().end());
    auto outcome_inputs = tree_features(data.columns(), true);
    std::vector<Feature> propensity_inputs;
    std::optional<ProbitForest> propensity;
    std::vector<double> e;
    if (augment_with_propensity) {
        propensity_inputs = tree_features(data.columns(), false);
        if (propensity_inputs.empty())
            throw ParameterError("propensity augmentation needs at least one covariate");
        propensity = sample_probit_forest(evaluate_features(propensity_inputs, data.x()), data.t(),
                                          config, derive_seed(seed, stream::propensity_model));
        e = propensity->mean_probability(evaluate_features(propensity_inputs, data.x()));
        outcome_inputs.push_back(propensity_feature(data.p()));
    }
    const Matrix u = evaluate_features(outcome_inputs, outcome_raw(data.x(), t, e));
    auto outcome = sample_probit_forest(u, data.y(), config, derive_seed(seed, stream::outcome_model));
    return FittedFlexModel(data.columns(), data.treatment_name(), data.outcome_name(), config, seed,
                           std::move(outcome_inputs), std::move(outcome), std::move(propensity_inputs),
                           std::move(propensity), data.x());
}

PosteriorDraws predict_draws(const FittedFlexModel& model, const Matrix& x) {
    check_columns(model, x);
    std::vector<double> e;
    if (model.augmented()) e = model.propensity_scores(x);
    const ProbitForest& f = model.outcome();
    PosteriorDraws out(f.draws(), x.rows());
    for (int t = 0; t < 2; ++t) {
        const std::vector<double> tv(x.rows(), static_cast<double>(t));
        const Matrix u = evaluate_features(model.outcome_inputs(), outcome_raw(x, tv, e));
        for (std::size_t d = 0; d < f.draws(); ++d) {
            auto arm = out.arm(d, t);
            for (std::size_t i = 0; i < x.rows(); ++i) arm[i] = f.probability(d, u.row(i));
        }
    }
    return out;
}

// Binary layout, little-endian native:
//   "ITRFLEX\0" | u32 version | u64 header length | JSON header
//   | outcome forest | u8 has propensity [| propensity forest] | training matrix
namespace {

constexpr char kMagic[8] = {'I', 'T', 'R', 'F', 'L', 'E', 'X', '\0'};
constexpr std::uint32_t kVersion = 1;

using nlohmann::json;

class Writer {
public:
    explicit Writer(const std::string& path) : out_(path, std::ios::binary) {
        if (!out_) throw Error("cannot open '" + path + "' for writing");
    }
    template <class T>
    void pod(const T& v) {
        out_.write(reinterpret_cast<const char*>(&v), sizeof(T));
    }
    void bytes(const void* p, std::size_t n) { out_.write(static_cast<const char*>(p), static_cast<std::streamsize>(n)); }
    void string(const std::string& s) {
        pod<std::uint64_t>(s.size());
        bytes(s.data(), s.size());
    }
    void doubles(const std::vector<double>& v) {
        pod<std::uint64_t>(v.size());
        bytes(v.data(), v.size() * sizeof(double));
    }
    void finish(const std::string& path) {
        out_.flush();
        if (!out_) throw Error("failed writing '" + path + "'");
    }

private:
    std::ofstream out_;
};

class Reader {
public:
    explicit Reader(const std::string& path) : in_(path, std::ios::binary), path_(path) {
        if (!in_) throw Error("cannot open model file '" + path + "'");
    }
    template <class T>
    T pod() {
        T v;
        bytes(&v, sizeof(T));
        return v;
    }
    void bytes(void* p, std::size_t n) {
        in_.read(static_cast<char*>(p), static_cast<std::streamsize>(n));
        if (!in_) throw Error("model file '" + path_ + "' is truncated");
    }
    std::uint64_t length(std::uint64_t limit = 1ULL << 32) {
        const auto n = pod<std::uint64_t>();
        if (n > limit) throw Error("model file '" + path_ + "' is corrupt");
        return n;
    }
    std::string string() {
        std::string s(length(), '\0');
        bytes(s.data(), s.size());
        return s;
    }
    std::vector<double> doubles() {
        std::vector<double> v(length());
        bytes(v.data(), v.size() * sizeof(double));
        return v;
    }

private:
    std::ifstream in_;
    std::string path_;
};

json features_json(const std::vector<Feature>& fs) {
    json a = json::array();
    for (const auto& f : fs)
        a.push_back({{"name", f.name},
                     {"kind", static_cast<int>(f.kind)},
                     {"column", f.column},
                     {"level", f.level},
                     {"times_treatment", f.times_treatment},
                     {"continuous", f.continuous}});
    return a;
}

std::vector<Feature> features_from(const json& a) {
    std::vector<Feature> out;
    for (const auto& j : a) {
        Feature f;
        f.name = j.at("name").get<std::string>();
        f.kind = static_cast<Feature::Kind>(j.at("kind").get<int>());
        f.column = j.at("column").get<int>();
        f.level = j.at("level").get<int>();
        f.times_treatment = j.at("times_treatment").get<bool>();
        f.continuous = j.at("continuous").get<bool>();
        out.push_back(f);
    }
    return out;
}

json config_json(const BartConfig& c) {
    return {{"num_trees", c.num_trees}, {"base", c.base},         {"power", c.power},
            {"k", c.k},                 {"iterations", c.iterations}, {"burn_in", c.burn_in},
            {"p_grow", c.p_grow},       {"p_prune", c.p_prune},   {"p_change", c.p_change},
            {"min_leaf_obs", c.min_leaf_obs}};
}

BartConfig config_from(const json& j) {
    BartConfig c;
    c.num_trees = j.at("num_trees").get<int>();
    c.base = j.at("base").get<double>();
    c.power = j.at("power").get<double>();
    c.k = j.at("k").get<double>();
    c.iterations = j.at("iterations").get<int>();
    c.burn_in = j.at("burn_in").get<int>();
    c.p_grow = j.at("p_grow").get<double>();
    c.p_prune = j.at("p_prune").get<double>();
    c.p_change = j.at("p_change").get<double>();
    c.min_leaf_obs = j.at("min_leaf_obs").get<std::size_t>();
    return c;
}

void write_forest(Writer& w, const ProbitForest& f) {
    w.pod<std::uint64_t>(f.cut_values().size());
    for (const auto& c : f.cut_values()) w.doubles(c);
    w.pod(f.offset());
    w.pod<std::uint64_t>(f.draws());
    for (const auto& d : f.forest_draws()) {
        w.pod<std::uint64_t>(d.nodes.size());
        for (const auto& nd : d.nodes) {
            w.pod(nd.var);
            w.pod(nd.cut);
            w.pod(nd.left);
            w.pod(nd.right);
            w.pod(nd.mu);
        }
        w.pod<std::uint64_t>(d.roots.size());
        w.bytes(d.roots.data(), d.roots.size() * sizeof(std::uint32_t));
    }
}

ProbitForest read_forest(Reader& r) {
    std::vector<std::vector<double>> cuts(r.length());
    for (auto& c : cuts) c = r.doubles();
    const double offset = r.pod<double>();
    std::vector<ForestDraw> draws(r.length());
    for (auto& d : draws) {
        d.nodes.resize(r.length());
        for (auto& nd : d.nodes) {
            nd.var = r.pod<std::int32_t>();
            nd.cut = r.pod<std::int32_t>();
            nd.left = r.pod<std::int32_t>();
            nd.right = r.pod<std::int32_t>();
            nd.mu = r.pod<double>();
        }
        d.roots.resize(r.length());
        r.bytes(d.roots.data(), d.roots.size() * sizeof(std::uint32_t));
        for (auto root : d.roots)
            if (root >= d.nodes.size()) throw Error("model file has a corrupt forest");
    }
    return ProbitForest(std::move(cuts), offset, std::move(draws));
}

}  // namespace

void save_model(const FittedFlexModel& model, const std::string& path) {
    json h;
    h["columns"] = json::array();
    for (const auto& c : model.columns())
        h["columns"].push_back({{"name", c.name}, {"kind", c.kind.name()}, {"levels", c.kind.levels}});
    h["treatment"] = model.treatment_name();
    h["outcome"] = model.outcome_name();
    h["config"] = config_json(model.config());
    h["seed"] = model.seed();
    h["outcome_inputs"] = features_json(model.outcome_inputs());
    h["propensity_inputs"] = features_json(model.propensity_inputs());

    Writer w(path);
    w.bytes(kMagic, sizeof kMagic);
    w.pod(kVersion);
    w.string(h.dump());
    write_forest(w, model.outcome());
    w.pod<std::uint8_t>(model.augmented());
    if (model.augmented()) write_forest(w, *model.propensity());
    const Matrix& x = model.training_x();
    w.pod<std::uint64_t>(x.rows());
    w.pod<std::uint64_t>(x.cols());
    w.bytes(x.data().data(), x.data().size() * sizeof(double));
    w.finish(path);
}

FittedFlexModel load_model(const std::string& path) {
    Reader r(path);
    char magic[8];
    r.bytes(magic, sizeof magic);
    if (std::memcmp(magic, kMagic, sizeof magic) != 0)
        throw Error("'" + path + "' is not a flexible-model file");
    const auto version = r.pod<std::uint32_t>();
    if (version != kVersion)
        throw Error("unsupported model file version " + std::to_string(version));
    try {
        const json h = json::parse(r.string());
        std::vector<ColumnSpec> columns;
        for (const auto& c : h.at("columns"))
            columns.push_back({c.at("name").get<std::string>(),
                               ColumnKind::parse(c.at("kind").get<std::string>(), c.at("levels").get<int>())});
        auto outcome = read_forest(r);
        std::optional<ProbitForest> propensity;
        if (r.pod<std::uint8_t>()) propensity = read_forest(r);
        const auto rows = r.length(), cols = r.length();
        Matrix x(rows, cols);
        r.bytes(x.data().data(), rows * cols * sizeof(double));
        return FittedFlexModel(std::move(columns), h.at("treatment").get<std::string>(),
                               h.at("outcome").get<std::string>(), config_from(h.at("config")),
                               h.at("seed").get<std::uint64_t>(), features_from(h.at("outcome_inputs")),
                               std::move(outcome), features_from(h.at("propensity_inputs")),
                               std::move(propensity), std::move(x));
    } catch (const json::exception& e) {
        throw Error("model file '" + path + "' has a bad header: " + e.what());
    }
}

}  // namespace itr
