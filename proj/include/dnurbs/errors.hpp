#pragma once

#include <stdexcept>
#include <string>

namespace dnurbs {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Parameter outside the knot range.
class DomainError : public Error {
public:
    using Error::Error;
};

class InvalidKnotVector : public Error {
public:
    using Error::Error;
};

/// Assembly requested on a knot vector it does not support (e.g. not open).
class UnsupportedKnotVector : public Error {
public:
    using Error::Error;
};

/// Rational denominator or a weight fell below the admissible bound.
class DegenerateWeights : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

/// Constraint rows are rank deficient, so no invertible dependent block exists.
class InfeasibleConstraints : public Error {
public:
    using Error::Error;
};

/// Dimension mismatch between collaborating objects.
class ContractError : public Error {
public:
    using Error::Error;
};

/// Conjugate gradient failed: iteration cap hit or the operator lost definiteness.
class SolverDivergence : public Error {
public:
    SolverDivergence(const std::string& what, double residual, int iterations)
        : Error(what), residual_(residual), iterations_(iterations) {}

    double residual() const noexcept { return residual_; }
    int iterations() const noexcept { return iterations_; }

private:
    double residual_;
    int iterations_;
};

}  // namespace dnurbs
