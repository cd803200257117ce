#pragma once

#include <stdexcept>
#include <string>

namespace wwlab {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operands live in algebras of different sizes.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// An argument is outside the documented domain (p < 1, |lambda| != 1, m > n-1, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A mathematical hypothesis of an operation does not hold for the given
/// dynamics (not a homomorphism, not ergodic, not weakly mixing, ...).
class HypothesisError : public Error {
 public:
  using Error::Error;
};

/// A numerical routine failed to produce a trustworthy result.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Malformed scenario configuration or serialized value.
class SchemaError : public Error {
 public:
  using Error::Error;
};

}  // namespace wwlab
