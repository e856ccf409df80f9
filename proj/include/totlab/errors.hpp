#pragma once

#include <stdexcept>
#include <string>

namespace totlab {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid argument (inverted range, n = 0, k = 0, ...). CLI exit code 2.
class ArgumentError : public Error {
 public:
  using Error::Error;
};

/// Argument outside a function's domain of definition (zeta at s <= 1, ...). CLI exit code 2.
class DomainError : public ArgumentError {
 public:
  using ArgumentError::ArgumentError;
};

/// Contour passes too close to a pole of the integrand. CLI exit code 2.
class GeometryError : public ArgumentError {
 public:
  using ArgumentError::ArgumentError;
};

/// Input exceeds a supported size cap. CLI exit code 3.
class CapacityError : public Error {
 public:
  using Error::Error;
};

/// Requested accuracy cannot be delivered in double precision. CLI exit code 3.
class PrecisionError : public Error {
 public:
  using Error::Error;
};

}  // namespace totlab
