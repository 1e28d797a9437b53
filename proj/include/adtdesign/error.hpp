#pragma once

#include <stdexcept>
#include <string>

namespace adt {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed model, design or scenario input (dimension mismatch, bad range).
class ConfigurationError : public Error {
 public:
  using Error::Error;
};

/// An information matrix that is not positive definite.
class SingularDesignError : public Error {
 public:
  using Error::Error;
};

/// sigma(t) == 0 where a positive standard deviation is required.
class DegenerateVarianceError : public Error {
 public:
  using Error::Error;
};

/// A closed-form construction was asked for outside the region where it holds.
class OutOfRegimeError : public Error {
 public:
  using Error::Error;
};

/// The constraint set is empty (too few grid points for the cap, etc.).
class InfeasibleError : public Error {
 public:
  using Error::Error;
};

/// Degradation path does not reach the threshold with a positive median.
class NoPositiveMedianError : public Error {
 public:
  using Error::Error;
};

}  // namespace adt
