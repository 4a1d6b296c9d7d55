#pragma once

#include <stdexcept>
#include <string>

namespace itr {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Invalid argument or configuration value.
class ParameterError : public Error {
public:
    using Error::Error;
};

// Malformed dataset / schema input. Carries the offending location when known.
class IngestionError : public Error {
public:
    IngestionError(const std::string& what, long row = -1, std::string column = {})
        : Error(format(what, row, column)), row_(row), column_(std::move(column)) {}

    long row() const noexcept { return row_; }
    const std::string& column() const noexcept { return column_; }

private:
    static std::string format(const std::string& what, long row, const std::string& column) {
        std::string msg = what;
        if (row >= 0) msg += " (row " + std::to_string(row) + ")";
        if (!column.empty()) msg += " (column '" + column + "')";
        return msg;
    }

    long row_;
    std::string column_;
};

// Input rows do not match the schema a model was trained on.
class PredictionError : public Error {
public:
    using Error::Error;
};

class InsufficientData : public Error {
public:
    using Error::Error;
};

// The CATE vector has zero spread, so standardized propensities are undefined.
class DegenerateCate : public Error {
public:
    using Error::Error;
};

// The requested potential-outcome correlation admits no valid joint table.
class InfeasibleCorrelation : public Error {
public:
    InfeasibleCorrelation(const std::string& what, double rho_lo, double rho_hi)
        : Error(what), lo_(rho_lo), hi_(rho_hi) {}

    double feasible_lo() const noexcept { return lo_; }
    double feasible_hi() const noexcept { return hi_; }

private:
    double lo_;
    double hi_;
};

}  // namespace itr
