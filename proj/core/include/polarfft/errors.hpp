#pragma once

#include <stdexcept>
#include <string>

namespace polarfft {

/// Base of every error the library throws on purpose.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad user input: malformed configuration, inadmissible parameters,
/// mismatched dimensions.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// The fixed-point iteration (or a point integrator) failed to converge.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

/// File could not be read, written or parsed.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace polarfft
