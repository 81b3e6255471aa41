#pragma once

#include <stdexcept>
#include <string>

namespace degenpar {

/// Argument outside the mathematical domain of an operation (negative time, p <= 1, ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Requested value lies beyond what the object can represent (e.g. h > beta(T_max)).
class RangeError : public std::range_error {
public:
    RangeError(const std::string& what, double limit)
        : std::range_error(what), limit_(limit) {}

    double limit() const noexcept { return limit_; }

private:
    double limit_;
};

/// A numerical procedure did not reach its target accuracy.
class NumericalError : public std::runtime_error {
public:
    NumericalError(const std::string& what, double achieved)
        : std::runtime_error(what), achieved_(achieved) {}

    double achieved_tolerance() const noexcept { return achieved_; }

private:
    double achieved_;
};

/// Malformed input object (non-symmetric matrix, size mismatch, bad spec string).
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A hypothesis of an operation fails for the given data (e.g. delta not bounded below).
class PreconditionViolation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

}  // namespace degenpar
