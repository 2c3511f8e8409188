#pragma once

#include <stdexcept>
#include <string>

namespace qnl {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of an operation (e.g. Omega <= 0).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Frequency outside a tabulated grid.
class RangeError : public Error {
 public:
  using Error::Error;
};

/// Operation needs a dissipative probe but Im chi^-1 == 0.
class LosslessProbe : public Error {
 public:
  using Error::Error;
};

/// Meter back-action PSD below hbar*|Im K|.
class FdtViolation : public Error {
 public:
  using Error::Error;
};

class SamplerError : public Error {
 public:
  using Error::Error;
};

class EmptyFeasibleRegion : public Error {
 public:
  using Error::Error;
};

/// Malformed or invalid sweep configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace qnl
