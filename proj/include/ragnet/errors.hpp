#pragma once

#include <stdexcept>
#include <string>

namespace ragnet {

// Invalid user input: malformed parameter files, out-of-range values,
// contradictory CLI flags.  The CLI maps this to exit code 2.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// A well-posed request whose computation cannot be completed to the promised
// accuracy (non-convergence, insufficient truncation, singular formulas).
// The CLI maps this to exit code 3.
class NumericError : public std::runtime_error {
public:
    explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace ragnet
