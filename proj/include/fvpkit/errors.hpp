#pragma once

#include <stdexcept>
#include <string>

namespace fvpkit {

/// Malformed inputs (non-SPD Gram tables, dimension mismatches, bad grids).
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when exponentiating +tA would leave the double range. Carries the
/// first offending mode and the exponent t·λ + log|x| that tripped the guard.
class OverflowError : public std::runtime_error {
 public:
  OverflowError(const std::string& what, int mode, double exponent)
      : std::runtime_error(what), mode_index(mode), exponent(exponent) {}

  int mode_index;
  double exponent;
};

}  // namespace fvpkit
