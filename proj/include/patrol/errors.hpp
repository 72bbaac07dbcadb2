#pragma once

#include <stdexcept>
#include <string>

namespace patrol {

// Bad geometry, graph, or experiment configuration.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// A state or argument violates a precondition (position inside a wall,
// mismatched rollouts, off-policy trace, ...).
struct UsageError : std::logic_error {
    explicit UsageError(const std::string& msg) : std::logic_error(msg) {}
};

// Non-finite values or a violated runtime bound.
struct NumericError : std::runtime_error {
    explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace patrol
