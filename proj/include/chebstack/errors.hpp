#pragma once

#include <stdexcept>
#include <string>

namespace chebstack {

// Base class for all library errors. exit_code() is the process exit status
// the CLI maps the error to: 2 input/config, 3 numeric failure, 4 cap exceeded.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
    virtual int exit_code() const noexcept { return 1; }
};

class ConfigError : public Error {
public:
    using Error::Error;
    int exit_code() const noexcept override { return 2; }
};

// Malformed input file; message carries the offending line number.
class ParseError : public Error {
public:
    using Error::Error;
    int exit_code() const noexcept override { return 2; }
};

class DimensionError : public Error {
public:
    using Error::Error;
    int exit_code() const noexcept override { return 2; }
};

// NaN coefficients, inverted bounds, or unsatisfiable-by-construction rows.
class MalformedSystemError : public Error {
public:
    using Error::Error;
    int exit_code() const noexcept override { return 2; }
};

// derivative() requested from a kind that has none.
class NotSmoothError : public Error {
public:
    using Error::Error;
    int exit_code() const noexcept override { return 2; }
};

// Solver cycled, exceeded its iteration cap, or produced inconsistent state.
class NumericError : public Error {
public:
    using Error::Error;
    int exit_code() const noexcept override { return 3; }
};

// A target sits outside the activation's range by more than the allowed level,
// so no weights can satisfy the corresponding constraint.
class RangeInfeasibleError : public Error {
public:
    using Error::Error;
    int exit_code() const noexcept override { return 3; }
};

// Vertex enumeration would exceed the configured budget.
class CapExceededError : public Error {
public:
    using Error::Error;
    int exit_code() const noexcept override { return 4; }
};

// Maximal deviation is below the identification tolerance: the weights
// interpolate the data and no stationarity verdict is defined there.
class ZeroDeviationError : public Error {
public:
    using Error::Error;
    int exit_code() const noexcept override { return 3; }
};

} // namespace chebstack
