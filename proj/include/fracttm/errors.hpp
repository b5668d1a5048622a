#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace fracttm {

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Vector/matrix/mesh sizes that do not conform.
class ShapeError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class QuadratureError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class UnsupportedProblem : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class LinearSolveError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Newton iteration did not reach tolerance within the iteration budget.
class NewtonFailure : public std::runtime_error {
public:
    NewtonFailure(const std::string& what, double last_residual, int iterations)
        : std::runtime_error(what), last_residual_(last_residual), iterations_(iterations) {}

    double last_residual() const noexcept { return last_residual_; }
    int iterations() const noexcept { return iterations_; }

private:
    double last_residual_;
    int iterations_;
};

}  // namespace fracttm
