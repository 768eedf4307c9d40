#pragma once

#include <stdexcept>
#include <string>

namespace biharm {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Two meshes (or spaces built on them) do not descend from the same macro mesh.
class IncompatibleMeshError : public Error {
 public:
  using Error::Error;
};

/// Raised for zero-area elements or evaluation outside the active mesh.
class GeometryError : public Error {
 public:
  using Error::Error;
};

/// Linear solver breakdown, indefinite matrix or iteration cap hit.
class SingularSystemError : public Error {
 public:
  using Error::Error;
};

/// A numerical input (quadrature value, coefficient) was not finite.
class NonFiniteError : public Error {
 public:
  using Error::Error;
};

/// Adaptive driver gave up (time step underflow, iteration cap).
class DriverAbort : public Error {
 public:
  using Error::Error;
};

}  // namespace biharm
