#pragma once

#include <stdexcept>
#include <string>

namespace hjdd {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A caller violated a documented precondition (bad sizes, bad parameters).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A geometric query fell outside the grid bounding box.
class OutOfDomain : public Error {
 public:
  using Error::Error;
};

/// The fixed-point iteration did not reach the requested tolerance.
class NotConverged : public Error {
 public:
  NotConverged(const std::string& what, int part = -1) : Error(what), part_(part) {}
  /// Sub-domain index the failure belongs to, or -1 for a whole-domain solve.
  int part() const noexcept { return part_; }

 private:
  int part_;
};

/// Some non-ghost node is not covered by any sub-domain mask.
class CoverageError : public Error {
 public:
  using Error::Error;
};

/// Step size h is so large that an interior node has no admissible control.
class StepSizeError : public Error {
 public:
  using Error::Error;
};

}  // namespace hjdd
