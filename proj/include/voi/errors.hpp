#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace voi {

/// Precondition violated by an argument (negative sigma, beta <= 0, ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Malformed or insufficient input data.
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid run configuration (CLI flags, config file, grids).
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A numerical routine could not produce a finite answer.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Cholesky factorization hit a non-positive pivot.
class NotPositiveDefinite : public NumericalError {
public:
    NotPositiveDefinite(std::size_t pivot, double value)
        : NumericalError("matrix is not positive definite: pivot " + std::to_string(pivot) +
                         " = " + std::to_string(value)),
          pivot_index(pivot), pivot_value(value) {}

    std::size_t pivot_index;
    double pivot_value;
};

}  // namespace voi
