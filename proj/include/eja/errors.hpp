#pragma once

#include <stdexcept>
#include <string>

namespace eja {

// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Malformed algebra spec string or config input.
struct ParseError : Error {
    using Error::Error;
};

// Invalid dimensions or mixed-algebra arithmetic.
struct DimensionError : Error {
    using Error::Error;
};

// Tensor construction would exceed the coefficient budget.
struct BudgetError : Error {
    std::size_t required_dim;
    BudgetError(const std::string& msg, std::size_t required)
        : Error(msg), required_dim(required) {}
};

// Scalar function applied outside its domain (e.g. log of a kernel eigenvalue).
struct DomainError : Error {
    double offending_eigenvalue;
    DomainError(const std::string& msg, double eigenvalue)
        : Error(msg), offending_eigenvalue(eigenvalue) {}
};

// Eigenvalue clusters too close to separate at the requested tolerance.
struct DegeneracyError : Error {
    using Error::Error;
};

// Numerical breakdown (non-real roots, negative eigenvalues beyond tolerance, ...).
struct NumericError : Error {
    using Error::Error;
};

// Input fails its declared invariants (not a state, not a measurement, ...).
struct ValidationError : Error {
    using Error::Error;
};

// Operation requested on an algebra that does not support it.
struct UnsupportedError : Error {
    using Error::Error;
};

// Refusal to run an operation whose correctness depends on an unverified
// axiom probe (composite power-associativity).
struct AxiomGateError : Error {
    using Error::Error;
};

}  // namespace eja
