#pragma once

#include <stdexcept>
#include <string>

namespace relight {

/// Base class for all errors raised by the library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// File could not be opened, read or written.
struct IoError : Error {
    using Error::Error;
};

/// Input data is structurally invalid (unsupported image format,
/// corrupt checkpoint, bad action map container, ...).
struct FormatError : Error {
    using Error::Error;
};

/// Operands have incompatible dimensions or out-of-range values.
struct ShapeError : Error {
    using Error::Error;
};

/// Invalid configuration (unknown key, unparsable value, bad combination).
struct ConfigError : Error {
    using Error::Error;
};

/// External aesthetic scorer misbehaved. Carries the raw child output
/// so the caller can see what the process actually said.
struct OracleError : Error {
    OracleError(const std::string& what, std::string raw = {})
        : Error(what), raw_output(std::move(raw)) {}

    std::string raw_output;
};

} // namespace relight
