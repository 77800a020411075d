#pragma once

#include <stdexcept>
#include <string>

namespace beclab {

// Precondition violations on user-facing inputs.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Numerical procedure failed to reach its target.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace beclab
