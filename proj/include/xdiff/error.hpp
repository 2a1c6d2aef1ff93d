#pragma once

#include <stdexcept>
#include <string>

namespace xdiff {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bad user input: malformed config, out-of-range parameter, unknown preset.
/// The CLI maps this to exit code 1.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Runtime failure of the numerics (solver breakdown, NaN in a step).
/// The CLI maps this to exit code 2.
class RuntimeFailure : public Error {
public:
    using Error::Error;
};

}  // namespace xdiff
