#pragma once

#include <stdexcept>
#include <string>

namespace cogmcs {

// Invalid or inconsistent configuration (empty MCS table, unknown policy, ...).
struct ConfigError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Vector/matrix dimensions that do not match the network or state layout.
struct ShapeError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// A weights or config file that cannot be parsed.
struct FormatError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace cogmcs
