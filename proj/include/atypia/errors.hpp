#pragma once

#include <limits>
#include <stdexcept>
#include <string>

namespace atypia {

/// Malformed input: non-Hermitian matrices, wrong dimensions, schema violations.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A scalar parameter outside the domain of a rate function.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A root finder could not bracket or converge.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Rates are extended reals; +inf is an ordinary value, not an error.
inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

}  // namespace atypia
