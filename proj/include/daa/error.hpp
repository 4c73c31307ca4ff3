#pragma once

#include <stdexcept>
#include <string>

namespace daa {

// Error taxonomy. The CLI maps these onto exit codes (2 usage, 3 data, 4 numerical).

/// Operand shapes do not conform.
class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A precondition on an argument value was violated.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Input data could not be parsed or failed validation.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A computation produced non-finite values or broke a numerical invariant.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace daa
