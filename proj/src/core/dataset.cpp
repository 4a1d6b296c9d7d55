#include "itr/core/dataset.hpp"

#include <cmath>
#include <fstream>
#include <set>

#include <json.hpp>

#include "itr/core/csv.hpp"
#include "itr/core/error.hpp"

namespace itr {

using json = nlohmann::json;

bool ColumnKind::accepts(double v) const {
    if (!std::isfinite(v)) return false;
    switch (type) {
        case Type::binary:
            return v == 0.0 || v == 1.0;
        case Type::ordinal:
        case Type::categorical:
            return v == std::floor(v) && v >= 1.0 && v <= static_cast<double>(levels);
        case Type::continuous:
            return true;
    }
    return false;
}

std::string ColumnKind::name() const {
    switch (type) {
        case Type::binary: return "binary";
        case Type::ordinal: return "ordinal";
        case Type::continuous: return "continuous";
        case Type::categorical: return "categorical";
    }
    return "?";
}

ColumnKind ColumnKind::parse(const std::string& name, int levels) {
    if (name == "binary") return binary();
    if (name == "continuous") return continuous();
    if (name == "ordinal" || name == "categorical") {
        if (levels < 2) throw IngestionError(name + " column needs \"levels\" >= 2");
        return name == "ordinal" ? ordinal(levels) : categorical(levels);
    }
    throw IngestionError("unknown column kind '" + name + "'");
}

void validate_covariates(const std::vector<ColumnSpec>& columns, const Matrix& x) {
    if (x.cols() != columns.size())
        throw IngestionError("covariate matrix has " + std::to_string(x.cols()) +
                             " columns, schema declares " + std::to_string(columns.size()));
    for (std::size_t i = 0; i < x.rows(); ++i)
        for (std::size_t j = 0; j < columns.size(); ++j)
            if (!columns[j].kind.accepts(x(i, j)))
                throw IngestionError("value " + csv::format(x(i, j)) + " is not a valid " +
                                         columns[j].kind.name() + " entry",
                                     static_cast<long>(i) + 1, columns[j].name);
}

Dataset::Dataset(std::vector<ColumnSpec> columns, Matrix x, BinaryVector t, BinaryVector y,
                 std::string treatment_name, std::string outcome_name)
    : columns_(std::move(columns)),
      x_(std::move(x)),
      t_(std::move(t)),
      y_(std::move(y)),
      treatment_name_(std::move(treatment_name)),
      outcome_name_(std::move(outcome_name)) {
    if (x_.rows() == 0) throw IngestionError("dataset has no rows");
    if (t_.size() != x_.rows() || y_.size() != x_.rows())
        throw IngestionError("X, T and Y row counts differ");
    std::set<std::string> names;
    for (const auto& c : columns_)
        if (!names.insert(c.name).second) throw IngestionError("duplicate column", -1, c.name);
    validate_covariates(columns_, x_);
    for (std::size_t i = 0; i < t_.size(); ++i) {
        if (t_[i] > 1) throw IngestionError("treatment must be 0/1", static_cast<long>(i) + 1);
        if (y_[i] > 1) throw IngestionError("outcome must be 0/1", static_cast<long>(i) + 1);
    }
}

Dataset Dataset::subset(const std::vector<std::size_t>& rows) const {
    BinaryVector t(rows.size()), y(rows.size());
    for (std::size_t k = 0; k < rows.size(); ++k) {
        t[k] = t_[rows[k]];
        y[k] = y_[rows[k]];
    }
    return Dataset(columns_, x_.select_rows(rows), std::move(t), std::move(y), treatment_name_,
                   outcome_name_);
}

namespace {

struct Schema {
    std::vector<ColumnSpec> covariates;
    std::string treatment;
    std::string outcome;
};

Schema read_schema(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IngestionError("cannot open schema '" + path + "'");
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::exception& e) {
        throw IngestionError(std::string("schema is not valid JSON: ") + e.what());
    }
    if (!doc.contains("columns") || !doc["columns"].is_array())
        throw IngestionError("schema lacks a \"columns\" array");
    Schema s;
    for (const auto& col : doc["columns"]) {
        const std::string name = col.value("name", "");
        const std::string role = col.value("role", "");
        if (name.empty()) throw IngestionError("schema column without a name");
        if (role == "treatment") {
            if (!s.treatment.empty()) throw IngestionError("schema declares two treatment columns");
            s.treatment = name;
        } else if (role == "outcome") {
            if (!s.outcome.empty()) throw IngestionError("schema declares two outcome columns");
            s.outcome = name;
        } else if (role == "covariate") {
            s.covariates.push_back({name, ColumnKind::parse(col.value("kind", ""),
                                                            col.value("levels", 0))});
        } else {
            throw IngestionError("unknown role '" + role + "'", -1, name);
        }
    }
    if (s.treatment.empty()) throw IngestionError("schema has no treatment column");
    if (s.outcome.empty()) throw IngestionError("schema has no outcome column");
    return s;
}

}  // namespace

Dataset load_dataset(const std::string& csv_path, const std::string& schema_path) {
    const Schema schema = read_schema(schema_path);
    const csv::Table table = csv::read(csv_path);

    // Every header field must be declared, and every declared column present.
    std::vector<long> cov_field(schema.covariates.size(), -1);
    long t_field = -1, y_field = -1;
    std::vector<ColumnSpec> ordered;
    std::vector<long> ordered_field;
    for (std::size_t f = 0; f < table.header.size(); ++f) {
        const std::string& h = table.header[f];
        if (h == schema.treatment) {
            t_field = static_cast<long>(f);
            continue;
        }
        if (h == schema.outcome) {
            y_field = static_cast<long>(f);
            continue;
        }
        bool known = false;
        for (const auto& c : schema.covariates)
            if (c.name == h) {
                ordered.push_back(c);
                ordered_field.push_back(static_cast<long>(f));
                known = true;
            }
        if (!known) throw IngestionError("column not declared in schema", -1, h);
    }
    for (const auto& c : schema.covariates)
        if (table.find(c.name) < 0) throw IngestionError("missing column", -1, c.name);
    if (t_field < 0) throw IngestionError("missing treatment column", -1, schema.treatment);
    if (y_field < 0) throw IngestionError("missing outcome column", -1, schema.outcome);

    const std::size_t n = table.rows.size();
    Matrix x(n, ordered.size());
    BinaryVector t(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
        const long row = static_cast<long>(i) + 1;
        const auto& fields = table.rows[i];
        for (std::size_t j = 0; j < ordered.size(); ++j) {
            const double v = csv::parse_double(fields[ordered_field[j]], row, ordered[j].name);
            if (!ordered[j].kind.accepts(v))
                throw IngestionError("value '" + fields[ordered_field[j]] + "' is not a valid " +
                                         ordered[j].kind.name() + " entry",
                                     row, ordered[j].name);
            x(i, j) = v;
        }
        const long tv = csv::parse_long(fields[t_field], row, schema.treatment);
        const long yv = csv::parse_long(fields[y_field], row, schema.outcome);
        if (tv != 0 && tv != 1) throw IngestionError("treatment must be 0/1", row, schema.treatment);
        if (yv != 0 && yv != 1) throw IngestionError("outcome must be 0/1", row, schema.outcome);
        t[i] = static_cast<std::uint8_t>(tv);
        y[i] = static_cast<std::uint8_t>(yv);
    }
    return Dataset(std::move(ordered), std::move(x), std::move(t), std::move(y), schema.treatment,
                   schema.outcome);
}

void save_dataset(const Dataset& data, const std::string& csv_path, const std::string& schema_path) {
    json cols = json::array();
    for (const auto& c : data.columns()) {
        json col = {{"name", c.name}, {"role", "covariate"}, {"kind", c.kind.name()}};
        if (c.kind.type == ColumnKind::Type::ordinal || c.kind.type == ColumnKind::Type::categorical)
            col["levels"] = c.kind.levels;
        cols.push_back(col);
    }
    cols.push_back({{"name", data.treatment_name()}, {"role", "treatment"}});
    cols.push_back({{"name", data.outcome_name()}, {"role", "outcome"}});
    {
        std::ofstream out(schema_path);
        if (!out) throw IngestionError("cannot write '" + schema_path + "'");
        out << json{{"version", 1}, {"columns", cols}}.dump(2) << '\n';
    }

    std::ofstream out(csv_path);
    if (!out) throw IngestionError("cannot write '" + csv_path + "'");
    std::vector<std::string> fields;
    for (const auto& c : data.columns()) fields.push_back(c.name);
    fields.push_back(data.treatment_name());
    fields.push_back(data.outcome_name());
    csv::write_row(out, fields);
    for (std::size_t i = 0; i < data.n(); ++i) {
        fields.clear();
        for (std::size_t j = 0; j < data.p(); ++j) fields.push_back(csv::format(data.x()(i, j)));
        fields.push_back(std::to_string(data.t()[i]));
        fields.push_back(std::to_string(data.y()[i]));
        csv::write_row(out, fields);
    }
}

}  // namespace itr
