#pragma once

#include <stdexcept>
#include <string>

namespace latentpde {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Shape / layout mismatch between arrays, grids or theta vectors.
class DimensionError : public Error {
public:
    using Error::Error;
};

/// Invalid or inconsistent configuration (CLI exit code 2).
class ConfigError : public Error {
public:
    using Error::Error;
};

/// A required input artifact (checkpoint, dataset) is missing (CLI exit code 3).
class MissingArtifactError : public Error {
public:
    using Error::Error;
};

/// NaN/Inf or solver instability (CLI exit code 4). Messages name the
/// time or step reached when known.
class NumericalError : public Error {
public:
    using Error::Error;
};

/// Corrupt or mismatched on-disk data.
class IoError : public Error {
public:
    using Error::Error;
};

/// A metric is undefined for the given inputs (zero-norm reference, short curve).
class MetricError : public Error {
public:
    using Error::Error;
};

} // namespace latentpde
