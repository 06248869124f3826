#pragma once

#include <stdexcept>
#include <string>

namespace csma {

// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Invalid argument or violated operation contract.
class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& what) : Error(what) {}
};

// Enumeration guard exceeded (state space too large to enumerate).
class CapacityError : public Error {
 public:
  explicit CapacityError(const std::string& what) : Error(what) {}
};

// Input chain does not have the structure an operation requires.
class StructureError : public ValidationError {
 public:
  explicit StructureError(const std::string& what) : ValidationError(what) {}
};

// Result would be dominated by floating-point cancellation.
class ConditioningError : public Error {
 public:
  explicit ConditioningError(const std::string& what) : Error(what) {}
};

// Query outside the catalogue of closed-form cases.
class UnsupportedCaseError : public Error {
 public:
  explicit UnsupportedCaseError(const std::string& what) : Error(what) {}
};

// Linear system singular, e.g. target unreachable.
class SingularSystemError : public Error {
 public:
  explicit SingularSystemError(const std::string& what) : Error(what) {}
};

}  // namespace csma
