#pragma once

#include <stdexcept>
#include <string>

namespace armtune {

/// Thrown when an operation receives a NaN or infinite argument.
struct NonFiniteInput : std::invalid_argument {
    explicit NonFiniteInput(const std::string& what) : std::invalid_argument(what) {}
};

/// Thrown when an integrator stage produces a non-finite derivative.
struct NonFiniteState : std::runtime_error {
    explicit NonFiniteState(const std::string& what) : std::runtime_error(what) {}
};

/// Thrown when a simulation or GA configuration violates its invariants.
struct InvalidConfig : std::invalid_argument {
    explicit InvalidConfig(const std::string& what) : std::invalid_argument(what) {}
};

/// Configuration file could not be parsed; carries line and key diagnostics.
class ParseError : public std::runtime_error {
public:
    ParseError(int line, std::string key, const std::string& what)
        : std::runtime_error("line " + std::to_string(line) +
                             (key.empty() ? "" : " (key '" + key + "')") + ": " + what),
          line_(line),
          key_(std::move(key)) {}

    int line() const { return line_; }
    const std::string& key() const { return key_; }

private:
    int line_;
    std::string key_;
};

/// A parsed configuration violates an invariant; the message names the field.
struct ValidationError : std::runtime_error {
    explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace armtune
