#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace advac {

/// Raised when a caller hands an operation inputs outside its contract.
class InvalidArgument : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// The reaction lower bound 1/tau + div(V)/2 is not positive, or the penalty is too small.
class CoercivityError : public std::runtime_error {
public:
    CoercivityError(const std::string& what, double min_divergence)
        : std::runtime_error(what), min_divergence_(min_divergence) {}
    double min_divergence() const { return min_divergence_; }

private:
    double min_divergence_;
};

/// Newton did not reach its tolerance; carries the residual norm of every iterate.
class StepFailure : public std::runtime_error {
public:
    StepFailure(const std::string& what, std::vector<double> history)
        : std::runtime_error(what), history_(std::move(history)) {}
    const std::vector<double>& history() const { return history_; }

private:
    std::vector<double> history_;
};

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace advac
