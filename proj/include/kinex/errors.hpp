#pragma once

#include <stdexcept>
#include <string>

namespace kinex {

/// Root of every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Argument outside the physical domain of an operation (negative temperature,
/// bias beyond depairing, normal state where a superfluid response is needed).
class DomainError : public Error {
public:
    explicit DomainError(const std::string& what, int segment = -1)
        : Error(what), segment_(segment) {}
    /// Index of the offending segment, or -1 when not segment-specific.
    int segment() const noexcept { return segment_; }

private:
    int segment_;
};

/// Quadrature or linear-algebra failure.
class NumericalError : public Error {
public:
    using Error::Error;
};

/// Least-squares fit that did not converge or produced an invalid result.
class FitError : public Error {
public:
    FitError(const std::string& what, int iterations = 0, double cost = 0.0)
        : Error(what), iterations_(iterations), cost_(cost) {}
    int iterations() const noexcept { return iterations_; }
    double cost() const noexcept { return cost_; }

private:
    int iterations_;
    double cost_;
};

class ArgumentError : public Error {
public:
    using Error::Error;
};

class RangeError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

/// Malformed input file; carries the 1-based line number when known.
class ParseError : public Error {
public:
    ParseError(const std::string& what, int line = 0)
        : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
    /// Same error, message prefixed with `where` (typically a file name).
    ParseError(const std::string& where, const ParseError& inner)
        : Error(where + ": " + inner.what()), line_(inner.line_) {}
    int line() const noexcept { return line_; }

private:
    int line_;
};

class IoError : public Error {
public:
    using Error::Error;
};

/// Dark-count query above the latching current, where the wire no longer self-resets.
class LatchedStateError : public Error {
public:
    using Error::Error;
};

}  // namespace kinex
