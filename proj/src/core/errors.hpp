#pragma once

#include <stdexcept>
#include <string>

namespace strataflow {

/// Invalid user input: malformed scenario, bad graph, out-of-range state.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Numerical breakdown: lost bracket, non-finite value, step too large.
class NumericError : public std::runtime_error {
public:
    explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

/// An iterative solver hit its cap without meeting its tolerance.
class ConvergenceError : public std::runtime_error {
public:
    explicit ConvergenceError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace strataflow
