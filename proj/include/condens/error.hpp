#pragma once

#include <stdexcept>
#include <string>

namespace condens {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A precondition of an operation was violated (bad shape, odd length, ...).
class ContractError : public Error {
public:
    using Error::Error;
};

/// Argument outside the mathematical domain of a function.
class DomainError : public Error {
public:
    using Error::Error;
};

/// Numerical failure: degenerate moments, rank-deficient fits, singular covariance.
class NumericalError : public Error {
public:
    using Error::Error;
};

/// Estimation could not produce a result (no peaks, all fits rejected, ...).
class EstimationError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

inline void require(bool cond, const std::string& what)
{
    if (!cond)
        throw ContractError(what);
}

} // namespace condens
