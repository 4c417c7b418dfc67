#pragma once

#include <stdexcept>
#include <string>

namespace acat {

// Base class for every error raised by the library. The C API maps each
// subclass onto a distinct status code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input outside an operation's domain (triangle inequality violated,
// parameter out of range, mixed spaces, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

// No path joins the requested pair.
class UnreachableError : public Error {
 public:
  using Error::Error;
};

// The requested capability does not exist for this space.
class UnsupportedError : public Error {
 public:
  using Error::Error;
};

// A property that the mathematics guarantees was observed to fail.
class InvariantViolation : public Error {
 public:
  using Error::Error;
};

// Malformed configuration or unknown recipe/key.
class UsageError : public Error {
 public:
  using Error::Error;
};

// Iterative solver did not converge.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

}  // namespace acat
