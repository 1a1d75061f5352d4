#pragma once

#include <stdexcept>
#include <string>

namespace ringshape {

// Invalid configuration or contract violation (CLI exit code 2).
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Filesystem / serialization failure (CLI exit code 3).
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace ringshape
