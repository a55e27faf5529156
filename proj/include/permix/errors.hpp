#pragma once

#include <stdexcept>
#include <string>

namespace permix {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An argument violates a precondition (mismatched spaces, out-of-range values).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A group or matrix exceeds the configured enumeration cap.
class SizeError : public Error {
 public:
  using Error::Error;
};

/// An exact computation would exceed the compute budget.
class BudgetError : public Error {
 public:
  using Error::Error;
};

}  // namespace permix
