#pragma once

#include <stdexcept>
#include <string>

namespace bbfair {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent input (bad dimensions, bad indices, parse errors).
class InputError : public Error {
 public:
  using Error::Error;
};

/// A point outside the open domain of the barrier function.
class DomainError : public Error {
 public:
  DomainError(const std::string& what, std::size_t resource)
      : Error(what), resource_(resource) {}
  std::size_t resource() const noexcept { return resource_; }

 private:
  std::size_t resource_;
};

/// An allocation that exceeds some resource capacity where feasibility is required.
class InfeasibleAllocation : public Error {
 public:
  using Error::Error;
};

/// Singular / ill-conditioned linear systems and non-positive directions.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Enumeration requested on an instance larger than the oracle supports.
class SizeGuardError : public Error {
 public:
  using Error::Error;
};

/// A result that should be valid by construction failed its own check.
class ConsistencyError : public Error {
 public:
  using Error::Error;
};

}  // namespace bbfair
