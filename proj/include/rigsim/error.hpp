#pragma once

#include <stdexcept>
#include <string>

namespace rigsim {

/// Argument outside an operation's domain (negative distance, wrong role, ...).
class DomainError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Invalid or inconsistent configuration (bad kernel parameters, impossible build mode).
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Kernel whose L1 norm is infinite.
class DivergentNormError : public ConfigError {
public:
    using ConfigError::ConfigError;
};

/// A numerical procedure stopped before reaching its tolerance.
class ConvergenceError : public std::runtime_error {
public:
    ConvergenceError(const std::string& what, double best_estimate, double error_estimate)
        : std::runtime_error(what), best_estimate_(best_estimate), error_estimate_(error_estimate) {}

    double best_estimate() const noexcept { return best_estimate_; }
    double error_estimate() const noexcept { return error_estimate_; }

private:
    double best_estimate_;
    double error_estimate_;
};

}  // namespace rigsim
