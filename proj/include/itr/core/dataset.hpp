#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "itr/core/matrix.hpp"

namespace itr {

struct ColumnKind {
    enum class Type { binary, ordinal, continuous, categorical };

    Type type = Type::continuous;
    int levels = 0;  // ordinal / categorical only

    static ColumnKind binary() { return {Type::binary, 2}; }
    static ColumnKind ordinal(int levels) { return {Type::ordinal, levels}; }
    static ColumnKind continuous() { return {Type::continuous, 0}; }
    static ColumnKind categorical(int levels) { return {Type::categorical, levels}; }

    bool accepts(double v) const;
    std::string name() const;
    static ColumnKind parse(const std::string& name, int levels);

    friend bool operator==(const ColumnKind&, const ColumnKind&) = default;
};

struct ColumnSpec {
    std::string name;
    ColumnKind kind;

    friend bool operator==(const ColumnSpec&, const ColumnSpec&) = default;
};

using BinaryVector = std::vector<std::uint8_t>;

// Covariates plus binary treatment and outcome. Validated on construction and
// immutable afterwards.
class Dataset {
public:
    Dataset(std::vector<ColumnSpec> columns, Matrix x, BinaryVector t, BinaryVector y,
            std::string treatment_name = "T", std::string outcome_name = "Y");

    std::size_t n() const noexcept { return x_.rows(); }
    std::size_t p() const noexcept { return columns_.size(); }

    const std::vector<ColumnSpec>& columns() const noexcept { return columns_; }
    const Matrix& x() const noexcept { return x_; }
    const BinaryVector& t() const noexcept { return t_; }
    const BinaryVector& y() const noexcept { return y_; }
    const std::string& treatment_name() const noexcept { return treatment_name_; }
    const std::string& outcome_name() const noexcept { return outcome_name_; }

    Dataset subset(const std::vector<std::size_t>& rows) const;

    friend bool operator==(const Dataset&, const Dataset&) = default;

private:
    std::vector<ColumnSpec> columns_;
    Matrix x_;
    BinaryVector t_;
    BinaryVector y_;
    std::string treatment_name_;
    std::string outcome_name_;
};

// Throws IngestionError if any covariate entry violates its column kind.
void validate_covariates(const std::vector<ColumnSpec>& columns, const Matrix& x);

// CSV with a header row plus a JSON schema sidecar:
//   {"version": 1, "columns": [{"name": "X_A", "role": "covariate", "kind": "binary"},
//                              {"name": "X_a", "role": "covariate", "kind": "ordinal", "levels": 4},
//                              {"name": "T", "role": "treatment"}, {"name": "Y", "role": "outcome"}]}
// Covariates keep the CSV header order.
Dataset load_dataset(const std::string& csv_path, const std::string& schema_path);
void save_dataset(const Dataset& data, const std::string& csv_path, const std::string& schema_path);

}  // namespace itr
