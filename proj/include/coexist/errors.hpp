#pragma once

#include <stdexcept>
#include <string>

namespace coexist {

/// Invalid configuration or violated operation precondition.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Growth model violates the structural assumptions (origin value,
/// monotonicity, self-limitation cap).
struct ModelError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Iterative solver failed to converge within its iteration budget.
class SolverError : public std::runtime_error {
public:
    SolverError(const std::string& what, double residual, int iterations)
        : std::runtime_error(what), residual_(residual), iterations_(iterations) {}

    double residual() const { return residual_; }
    int iterations() const { return iterations_; }

private:
    double residual_;
    int iterations_;
};

/// Internal consistency failure, e.g. an iterate escaped its bracket
/// because a coupling constant was too small.
struct InternalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A reported quantity could not be evaluated from the available inputs.
struct EvaluationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace coexist
