#pragma once

#include <stdexcept>
#include <string>

namespace nested {

// Argument errors use std::invalid_argument. The types below map onto the
// CLI exit codes (2 config, 3 numeric, 4 I/O).

/// Input lies outside the domain where a closed form or root branch exists.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// A numerical routine failed (non-finite data, no admissible root, ...).
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Iterative solver hit its cap without meeting the convergence criterion.
class SolverError : public NumericError {
public:
    SolverError(const std::string& what, int sweeps, double residual)
        : NumericError(what), sweeps_(sweeps), residual_(residual) {}

    int sweeps() const noexcept { return sweeps_; }
    double residual() const noexcept { return residual_; }

private:
    int sweeps_;
    double residual_;
};

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace nested
