#pragma once

#include <stdexcept>
#include <string>

namespace exball {

// Base of every error raised by the library. Subclasses map onto the CLI
// exit codes in cli_runner.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed or non-finite input data (NaN samples, violated Dirichlet ends).
class DataError : public Error {
 public:
  using Error::Error;
};

// Argument outside its documented range.
class ParameterError : public Error {
 public:
  using Error::Error;
};

// Point outside the domain of a kernel or formula (r < 1, t = 0, r = s).
class DomainError : public Error {
 public:
  using Error::Error;
};

// Ratio undefined because the input vanishes.
class DegenerateInputError : public Error {
 public:
  using Error::Error;
};

// The grid or snapshot spacing is too coarse for the requested quantity.
class ResolutionError : public Error {
 public:
  using Error::Error;
};

// Evolution produced NaN/Inf.
class NumericalAbort : public Error {
 public:
  using Error::Error;
};

// Persisted data failed an integrity check (hash mismatch, missing file).
class IntegrityError : public Error {
 public:
  using Error::Error;
};

}  // namespace exball
