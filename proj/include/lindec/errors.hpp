#pragma once

#include <stdexcept>
#include <string>

namespace lindec {

// Base class for everything this library throws on purpose.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Incompatible matrix/vector dimensions.
struct ShapeError : Error {
    using Error::Error;
};

// A caller-supplied value is outside its documented range.
struct ParameterError : Error {
    using Error::Error;
};

// An operation that needs at least one row/element got none.
struct EmptyDataError : Error {
    using Error::Error;
};

// Column layout of a CSV (or a config schema) does not match expectations.
struct SchemaError : Error {
    using Error::Error;
};

// A cell of an input file could not be interpreted.
struct ParseError : Error {
    using Error::Error;
};

// Variance of the reference signal is numerically zero, so an R^2-style
// statistic is undefined. Callers decide whether to skip or abort.
struct DegenerateVarianceError : Error {
    using Error::Error;
};

// Experiment config file is syntactically or semantically invalid.
struct ConfigError : Error {
    using Error::Error;
};

// Filesystem problem (missing input, unwritable output).
struct IoError : Error {
    using Error::Error;
};

} // namespace lindec
