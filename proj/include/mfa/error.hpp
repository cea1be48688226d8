#pragma once

#include <stdexcept>
#include <string>

namespace mfa {

/// Input violates a precondition (bad length, non-positive price, invalid grid...).
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Input is well-formed but carries no usable structure (constant series,
/// zero denominator, all segments perfectly detrended).
class DegenerateInput : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A numerical routine failed (singular fit, non-positive circulant eigenvalue).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace mfa
