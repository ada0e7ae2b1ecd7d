#pragma once

#include <stdexcept>
#include <string>

namespace tkrr {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A caller violated a documented precondition (bad dimension, out-of-range
/// index, invalid parameter).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Malformed or inconsistent experiment configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A factorization, eigensolve or fixed-point iteration failed.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// A mathematical invariant that must hold (PSD, interlacing, quadrature
/// agreement) was observed to fail.
class InvariantError : public Error {
 public:
  using Error::Error;
};

/// I/O failure while reading inputs or writing artifacts.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace tkrr
