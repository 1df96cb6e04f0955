#pragma once

#include <stdexcept>
#include <string>

namespace newsflow {

// Malformed or inconsistent input data (bad row, duplicate key, ...).
class DataError : public std::runtime_error {
public:
    explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

// Input that is formally valid but carries no usable signal
// (all-zero volume days, a company with no prices, ...).
class DegenerateInputError : public std::runtime_error {
public:
    explicit DegenerateInputError(const std::string& what) : std::runtime_error(what) {}
};

// Not enough observations to run the requested estimator.
class InsufficientDataError : public std::runtime_error {
public:
    explicit InsufficientDataError(const std::string& what) : std::runtime_error(what) {}
};

// Rank-deficient or ill-conditioned regression design.
class SingularRegressionError : public std::runtime_error {
public:
    explicit SingularRegressionError(const std::string& what) : std::runtime_error(what) {}
};

// Nonlinear fit failed to converge.
class FitFailureError : public std::runtime_error {
public:
    explicit FitFailureError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace newsflow
