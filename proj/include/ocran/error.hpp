#pragma once

#include <stdexcept>
#include <string>

namespace ocran {

// Bad input: malformed files, violated invariants, unmet preconditions.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Requested problem exceeds a hard size guard.
class CapacityError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

// A numerical routine could not produce a finite answer.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace ocran
