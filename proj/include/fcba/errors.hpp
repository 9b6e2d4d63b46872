#pragma once

#include <stdexcept>
#include <string>

namespace fcba {

/// Argument outside the mathematical domain of a function (CGF pole, x <= 0, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Operation requested for a distribution family or order it does not support.
class UnsupportedModel : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Ill-formed argument: bad ratios, bad indices, mismatched sizes.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Numerical failure inside a solver or integrator.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace fcba
