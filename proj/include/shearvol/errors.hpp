#pragma once

#include <stdexcept>
#include <string>

namespace shearvol {

// Root of every exception raised by the library. The CLI maps the concrete
// subclasses onto its exit codes, so keep the taxonomy flat and stable.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid ShearletConfig (dimension count, parity, minimum size, levels).
class ConfigError : public Error {
 public:
  using Error::Error;
};

// The built frame has a weight field below the lower frame bound.
class FrameError : public Error {
 public:
  using Error::Error;
};

// Dimensions of operands disagree.
class ShapeError : public Error {
 public:
  using Error::Error;
};

// Input data violates a value invariant (non-finite samples, bad ranges).
class ValidationError : public Error {
 public:
  using Error::Error;
};

// An index or region lies outside the data it refers to.
class BoundsError : public Error {
 public:
  using Error::Error;
};

// A scalar parameter is out of its admissible domain.
class ParameterError : public Error {
 public:
  using Error::Error;
};

// A metric cannot be evaluated on the given data (e.g. zero variance).
class MetricUndefinedError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class BadMagicError : public IoError {
 public:
  using IoError::IoError;
};

class TruncatedError : public IoError {
 public:
  using IoError::IoError;
};

class UnwritableError : public IoError {
 public:
  using IoError::IoError;
};

class UnreadableError : public IoError {
 public:
  using IoError::IoError;
};

// Header fields are readable but inconsistent (unknown sample type, zero
// dims, trailing payload bytes).
class FormatError : public IoError {
 public:
  using IoError::IoError;
};

}  // namespace shearvol
