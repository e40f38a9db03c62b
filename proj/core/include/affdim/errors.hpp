#pragma once

#include <stdexcept>
#include <string>

namespace affdim {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Non-finite entries, non-contractive or singular maps, malformed weights.
class InvalidInput : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

/// The data at hand cannot decide the question (for example a spectral gap
/// too small at the requested depth).  Carries the quantity that was observed.
class Inconclusive : public Error {
 public:
  Inconclusive(const std::string& what, double observed)
      : Error(what), observed_(observed) {}
  double observed() const noexcept { return observed_; }

 private:
  double observed_;
};

/// An exhaustive computation would exceed its configured work budget.
class BudgetExceeded : public Error {
 public:
  using Error::Error;
};

/// The caller asked for something the preconditions rule out, e.g. a bundle
/// for an index that is not dominated.
class Refused : public Error {
 public:
  using Error::Error;
};

/// Estimated objects are mutually inconsistent (e.g. an intersection with the
/// wrong dimension).
class InconsistentEstimate : public Error {
 public:
  using Error::Error;
};

}  // namespace affdim
