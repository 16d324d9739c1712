#pragma once

#include <stdexcept>
#include <string>

namespace projprime {

/// Raised when an argument violates an operation's precondition.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Raised when persisted state (checkpoints, hit streams) fails validation.
class IntegrityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace projprime
