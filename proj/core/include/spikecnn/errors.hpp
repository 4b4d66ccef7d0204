#pragma once

#include <stdexcept>
#include <string>

namespace spikecnn {

/// Base class for all errors raised by this library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Operand dimensions do not match what an operation requires.
struct ShapeError : Error {
    using Error::Error;
};

/// A scalar argument is outside its permitted range.
struct ValueError : Error {
    using Error::Error;
};

/// A configuration file is malformed, has unknown keys, or holds
/// inconsistent values.
struct ConfigError : Error {
    using Error::Error;
};

/// A data file (dataset, checkpoint) is malformed or truncated.
struct DataError : Error {
    using Error::Error;
};

/// A checkpoint was written by an incompatible format version.
struct VersionError : DataError {
    using DataError::DataError;
};

/// A computation produced a non-finite value.
struct NumericError : Error {
    using Error::Error;
};

/// The operating system refused a file operation.
struct IoError : Error {
    using Error::Error;
};

}  // namespace spikecnn
