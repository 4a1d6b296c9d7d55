#include "itr/simple/features.hpp"

#include "itr/core/error.hpp"

namespace itr {

double Feature::eval(std::span<const double> raw, double t) const {
    double v = 1.0;
    switch (kind) {
        case Kind::intercept: break;
        case Kind::value: v = raw[static_cast<std::size_t>(column)]; break;
        case Kind::indicator:
            v = raw[static_cast<std::size_t>(column)] == static_cast<double>(level) ? 1.0 : 0.0;
            break;
    }
    return times_treatment ? v * t : v;
}

std::vector<Feature> tree_features(const std::vector<ColumnSpec>& columns, bool with_treatment) {
    std::vector<Feature> out;
    for (std::size_t j = 0; j < columns.size(); ++j) {
        const auto& c = columns[j];
        const int col = static_cast<int>(j);
        if (c.kind.type == ColumnKind::Type::categorical) {
            for (int l = 1; l <= c.kind.levels; ++l)
                out.push_back({c.name + "==" + std::to_string(l), Feature::Kind::indicator, col, l});
        } else {
            Feature f{c.name, Feature::Kind::value, col};
            f.continuous = c.kind.type == ColumnKind::Type::continuous;
            out.push_back(f);
        }
    }
    if (with_treatment)
        out.push_back({"T", Feature::Kind::value, static_cast<int>(columns.size())});
    return out;
}

std::vector<Feature> logistic_basis(const std::vector<ColumnSpec>& columns, bool with_treatment) {
    std::vector<Feature> main;
    for (std::size_t j = 0; j < columns.size(); ++j) {
        const auto& c = columns[j];
        const int col = static_cast<int>(j);
        switch (c.kind.type) {
            case ColumnKind::Type::binary:
            case ColumnKind::Type::continuous:
                main.push_back({c.name, Feature::Kind::value, col});
                break;
            case ColumnKind::Type::ordinal:
            case ColumnKind::Type::categorical:
                for (int l = 2; l <= c.kind.levels; ++l)
                    main.push_back({c.name + "==" + std::to_string(l), Feature::Kind::indicator, col, l});
                break;
        }
    }
    std::vector<Feature> out;
    out.push_back({"(intercept)", Feature::Kind::intercept});
    out.insert(out.end(), main.begin(), main.end());
    if (with_treatment) {
        Feature t{"T", Feature::Kind::intercept};
        t.times_treatment = true;
        out.push_back(t);
        for (auto f : main) {
            f.name += ":T";
            f.times_treatment = true;
            out.push_back(f);
        }
    }
    return out;
}

Matrix evaluate_features(const std::vector<Feature>& features, const Matrix& raw,
                         std::span<const double> treatment) {
    if (!treatment.empty() && treatment.size() != raw.rows())
        throw ParameterError("treatment vector length differs from the row count");
    for (const auto& f : features)
        if (f.column >= static_cast<int>(raw.cols()))
            throw PredictionError("feature '" + f.name + "' needs " + std::to_string(f.column + 1) +
                                  " input columns, got " + std::to_string(raw.cols()));
    Matrix out(raw.rows(), features.size());
    for (std::size_t i = 0; i < raw.rows(); ++i) {
        const auto row = raw.row(i);
        const double t = treatment.empty() ? (raw.cols() ? row[raw.cols() - 1] : 0.0) : treatment[i];
        for (std::size_t k = 0; k < features.size(); ++k) out(i, k) = features[k].eval(row, t);
    }
    return out;
}

Matrix append_column(const Matrix& x, std::span<const double> column) {
    if (column.size() != x.rows()) throw ParameterError("appended column length differs");
    Matrix out(x.rows(), x.cols() + 1);
    for (std::size_t i = 0; i < x.rows(); ++i) {
        for (std::size_t j = 0; j < x.cols(); ++j) out(i, j) = x(i, j);
        out(i, x.cols()) = column[i];
    }
    return out;
}

}  // namespace itr
