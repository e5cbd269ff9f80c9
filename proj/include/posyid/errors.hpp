#pragma once

#include <stdexcept>
#include <string>

namespace posyid {

// Base class for every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid grids, weights, solver settings or CLI usage.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Inputs outside the positive orthant, or other out-of-domain arguments.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Malformed or inconsistent data files and dimension mismatches.
class DataError : public Error {
 public:
  using Error::Error;
};

// Non-finite intermediates or broken analytic guarantees (rounding).
class NumericalError : public Error {
 public:
  using Error::Error;
};

// A value violates a model invariant (e.g. negative posynomial coefficient).
class IntegrityError : public Error {
 public:
  using Error::Error;
};

}  // namespace posyid
