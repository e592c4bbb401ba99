#pragma once

#include <stdexcept>
#include <string>

namespace chromainv {

/// Bad input: out-of-range parameters, malformed files, inconsistent sizes.
class ValidationError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// The numerics failed: CFL violation, non-convergence, non-finite state,
/// training divergence.
class NumericalError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Filesystem or stream failure.
class IoError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

} // namespace chromainv
