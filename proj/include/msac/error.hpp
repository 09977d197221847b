#pragma once

#include <stdexcept>
#include <string>

namespace msac {

/// Base class for every failure raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid physical or numerical input (non-positive mass, V <= 0, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

/// Outward integration stopped early because a component diverged.
class TruncationError : public Error {
public:
    TruncationError(const std::string& what, double last_valid_x)
        : Error(what), last_valid_x_(last_valid_x) {}

    [[nodiscard]] double last_valid_x() const noexcept { return last_valid_x_; }

private:
    double last_valid_x_;
};

/// An iterative search (slope, eigenvalue, matrix element) did not settle.
class ConvergenceError : public Error {
public:
    using Error::Error;
};

/// A bracket holds zero or several minima, or parity alternation broke.
class BracketError : public Error {
public:
    using Error::Error;
};

/// A local tail fit has no usable signal (vanishing centre sample).
class FitError : public Error {
public:
    using Error::Error;
};

/// A requested location lies outside the computed grid or wave.
class RangeError : public Error {
public:
    using Error::Error;
};

/// A resonance or sampled curve is not resolved finely enough.
class ResolutionError : public Error {
public:
    using Error::Error;
};

/// Time propagation blew up or produced a non-exponential decay.
class PropagationError : public Error {
public:
    using Error::Error;
};

/// Bad run configuration (CLI / config file level).
class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace msac
