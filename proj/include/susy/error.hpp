#pragma once

#include <stdexcept>
#include <string>

namespace susy {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on user-supplied data does not hold (bad grid, bad parameter, ...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A support function is non-positive or non-finite somewhere it is evaluated.
class InvalidSupport : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

/// A numerical invariant was violated or a computation did not converge.
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace susy
