#pragma once

#include <stdexcept>
#include <string>

namespace pseudoherm {

/// Dimension mismatch between operands (e.g. product of incompatible shapes).
class ShapeError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Argument outside its admissible range (N < 2, index out of range, ...).
class DomainError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Input violates a documented precondition (e.g. a matrix that must be
/// Hermitian is not, within the stated tolerance).
class ContractViolation : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A metric matrix is singular or otherwise unusable as a metric.
class InvalidMetricError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A matrix required to be positive-definite has an eigenvalue at or below
/// the positivity tolerance. Carries the offending eigenvalue.
class NotPositiveDefiniteError : public std::runtime_error {
public:
    NotPositiveDefiniteError(const std::string& what, double min_eigenvalue)
        : std::runtime_error(what), min_eigenvalue_(min_eigenvalue) {}

    double min_eigenvalue() const noexcept { return min_eigenvalue_; }

private:
    double min_eigenvalue_;
};

/// Iterative kernel failed to converge, or an internal consistency check
/// (e.g. an imaginary residue that should vanish) exceeded its bound.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// File could not be read or written.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace pseudoherm
