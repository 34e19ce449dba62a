// SPDX-License-Identifier: MIT
#pragma once

#include <stdexcept>
#include <string>

namespace cmf {

// Invalid model or domain-type parameters (a <= 0, Feller condition, bad Q-matrix, ...).
struct ParameterError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Argument outside an operation's domain (t <= 0, u outside (0,1), ...).
struct DomainError : std::domain_error {
    using std::domain_error::domain_error;
};

// Mismatched vector or matrix dimensions.
struct ShapeError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Invalid coupling or run configuration.
struct ConfigError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// A numerical routine failed to reach its tolerance; the message carries the
// achieved value.
struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Operation defined only for a specific model family.
struct UnsupportedModelError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Conditioning event of a bridge has probability zero.
struct BridgeUndefinedError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Q-matrix input file rejected; line numbers are 1-based.
struct QMatrixParseError : std::runtime_error {
    QMatrixParseError(int line_no, const std::string& message)
        : std::runtime_error("line " + std::to_string(line_no) + ": " + message),
          line(line_no) {}
    int line;
};

}  // namespace cmf
