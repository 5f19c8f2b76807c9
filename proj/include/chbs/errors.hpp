#pragma once

#include <stdexcept>
#include <string>

namespace chbs {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Argument outside the effective domain of a graph, or non-finite input.
class DomainError : public Error {
public:
    using Error::Error;
};

/// Vector dimensions do not match the discrete domain.
class ShapeError : public Error {
public:
    using Error::Error;
};

/// An operation was called outside its precondition (e.g. nonzero mean).
class PreconditionError : public Error {
public:
    using Error::Error;
};

/// Root finder, factorization or eigensolver failure.
class NumericalError : public Error {
public:
    using Error::Error;
};

/// Initial data incompatible with the graphs (value outside D(beta), m0 on the boundary of D(beta_Gamma)).
class CompatibilityError : public Error {
public:
    using Error::Error;
};

/// Invalid configuration value or malformed config text.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Nonlinear solve of a time step did not converge.
class StepError : public Error {
public:
    StepError(const std::string& what, double last_residual)
        : Error(what), last_residual_(last_residual) {}

    double last_residual() const noexcept { return last_residual_; }

private:
    double last_residual_;
};

}  // namespace chbs
