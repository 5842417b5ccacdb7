#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace clonekit {

using real = double;
using complex = std::complex<double>;

/// Absolute tolerance used by every numerical comparison unless a call
/// overrides it.
inline constexpr real default_tolerance = 1e-9;

/// Malformed input: bad dimensions, out-of-range probabilities or overlaps.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Well-formed input describing a machine that cannot exist.
class InfeasibleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A numerical routine failed to meet its postcondition.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace clonekit
