#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace exposure_glm {

/// Base class for every error raised by the library. `kind()` is a stable
/// machine-readable tag used in CLI error reports.
class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& message)
        : std::runtime_error(message), kind_(std::move(kind)) {}

    const std::string& kind() const noexcept { return kind_; }

private:
    std::string kind_;
};

/// A scalar argument is outside its admissible domain (p, t, phi, ...).
class DomainError : public Error {
public:
    explicit DomainError(const std::string& message) : Error("domain_error", message) {}
};

/// Vector or matrix sizes do not agree.
class DimensionError : public Error {
public:
    explicit DimensionError(const std::string& message) : Error("dimension_error", message) {}
};

/// The design matrix does not have full column rank.
class RankDeficientError : public Error {
public:
    RankDeficientError(const std::string& message, std::vector<std::string> columns)
        : Error("rank_deficient", message), columns_(std::move(columns)) {}

    /// Names of the columns involved in the linear dependency.
    const std::vector<std::string>& columns() const noexcept { return columns_; }

private:
    std::vector<std::string> columns_;
};

/// Symmetric positive-definite factorization failed.
class FactorizationError : public Error {
public:
    explicit FactorizationError(const std::string& message)
        : Error("factorization_failed", message) {}
};

/// The IRLS starting point cannot be built (e.g. every loss is zero).
class InitializationError : public Error {
public:
    explicit InitializationError(const std::string& message)
        : Error("initialization_failed", message) {}
};

/// Operation requires a non-empty input.
class EmptyInputError : public Error {
public:
    explicit EmptyInputError(const std::string& message) : Error("empty_input", message) {}
};

/// Inputs are individually valid but do not belong together.
class MismatchError : public Error {
public:
    explicit MismatchError(const std::string& message) : Error("mismatch", message) {}
};

/// Objective or intermediate quantity became NaN or infinite.
class NonFiniteError : public Error {
public:
    explicit NonFiniteError(const std::string& message) : Error("non_finite", message) {}
};

/// Malformed input file. Row numbers are 1-based and count the header as row 1.
class ParseError : public Error {
public:
    ParseError(std::size_t row, std::string column, const std::string& message)
        : Error("parse_error", message), row_(row), column_(std::move(column)) {}

    std::size_t row() const noexcept { return row_; }
    const std::string& column() const noexcept { return column_; }

private:
    std::size_t row_;
    std::string column_;
};

}  // namespace exposure_glm
