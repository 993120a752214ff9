#pragma once

#include <stdexcept>
#include <string>

namespace fedecay {

/// Invalid experiment configuration or CLI usage. The CLI maps this to exit code 2.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// File/stream parse failure carrying the 1-based line number where it occurred.
class ParseError : public std::runtime_error {
public:
    ParseError(int line, const std::string& message)
        : std::runtime_error("line " + std::to_string(line) + ": " + message), line_(line) {}

    int line() const { return line_; }

private:
    int line_;
};

/// Iterative solver failure. The CLI maps this to exit code 3.
class SolverError : public std::runtime_error {
public:
    SolverError(const std::string& message, double residual, int iterations)
        : std::runtime_error(message), residual_(residual), iterations_(iterations) {}

    double residual() const { return residual_; }
    int iterations() const { return iterations_; }

private:
    double residual_;
    int iterations_;
};

/// The discrete problem is singular: lambda = 0 together with an empty
/// homogeneous boundary part violates the coercivity assumption.
class SingularProblemError : public SolverError {
public:
    explicit SingularProblemError(const std::string& message)
        : SolverError(message, 0.0, 0) {}
};

}  // namespace fedecay
