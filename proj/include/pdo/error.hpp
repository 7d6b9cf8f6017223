#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace pdo {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Non-finite or otherwise malformed input values.
class InvalidInput : public Error {
public:
    using Error::Error;
};

/// Incompatible grids, algebra dimensions or array sizes.
class ShapeError : public Error {
public:
    using Error::Error;
};

/// An operation was called outside its domain (e.g. a bounded field where a
/// rapidly decreasing one is required, an off-grid translation).
class PreconditionError : public Error {
public:
    using Error::Error;
};

/// The grid cannot resolve the requested stencil, bump or step.
class ResolutionError : public Error {
public:
    using Error::Error;
};

/// A regularized limit failed to settle. Carries the sequence of successive
/// differences so callers can report it.
class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& what, std::vector<double> trace)
        : Error(what), trace_(std::move(trace)) {}

    const std::vector<double>& trace() const noexcept { return trace_; }

private:
    std::vector<double> trace_;
};

}  // namespace pdo
