#pragma once

#include <stdexcept>
#include <string>

namespace sparsets {

/// Precondition violated by the caller (bad shape, out-of-range parameter).
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A numerical routine could not produce a trustworthy answer
/// (instability, singular system, solver non-convergence).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// File or format problem while reading or writing project data.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace sparsets
