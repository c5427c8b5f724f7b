#pragma once

#include <stdexcept>
#include <string>

namespace optstop {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid model or algorithm parameter (non-positive maturity, K < B, ...).
class ParameterError : public Error {
 public:
  using Error::Error;
};

// State or feature vector has the wrong length for the operation.
class DimensionError : public Error {
 public:
  using Error::Error;
};

// Configuration file or override could not be parsed or resolved.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Requested combination is outside what a routine supports (e.g. LS with D > 1).
class UnsupportedError : public Error {
 public:
  using Error::Error;
};

// An invariant that callers cannot violate was broken.
class InternalError : public Error {
 public:
  using Error::Error;
};

}  // namespace optstop
