#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace tra {

/// Base class for every failure raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A precondition on caller-supplied parameters does not hold.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// A point lies outside the domain of a function (e.g. r <= 0, x <= 1).
class DomainError : public Error {
public:
    using Error::Error;
};

/// A truncation-doubling or grid-doubling loop did not settle.
class ConvergenceFailure : public Error {
public:
    using Error::Error;
};

/// An eigensolver, quadrature rule or recurrence produced unusable numbers.
class NumericalBreakdown : public Error {
public:
    NumericalBreakdown(const std::string& what, std::ptrdiff_t index = -1)
        : Error(what), index_(index) {}

    /// Offending index (recursion degree, node), or -1 when not applicable.
    std::ptrdiff_t index() const noexcept { return index_; }

private:
    std::ptrdiff_t index_;
};

/// Cholesky factorisation hit a non-positive pivot.
class ConditioningError : public Error {
public:
    ConditioningError(const std::string& what, std::size_t pivot)
        : Error(what), pivot_(pivot) {}

    std::size_t pivot() const noexcept { return pivot_; }

private:
    std::size_t pivot_;
};

/// Bracketing or grid search found nothing to work with.
class SearchFailure : public Error {
public:
    using Error::Error;
};

} // namespace tra
