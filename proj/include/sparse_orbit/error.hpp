#pragma once

#include <stdexcept>
#include <string>

namespace sparse_orbit {

/// Precondition violated by the caller (bad modulus, non-coprime inputs, ...).
class InvalidArgument : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// An enumeration or orbit computation would exceed its declared work budget.
class BudgetExceeded : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The requested precision cannot be certified with the available data
/// (too few convergents, a point too close to the roof boundary, ...).
class PrecisionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace sparse_orbit
