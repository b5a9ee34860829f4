#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace coingame {

// Failure categories; each maps onto one CLI exit code.
enum class ErrorKind {
  kUsage = 1,         // malformed input, bad arguments
  kPrecondition = 2,  // operation precondition or modelling assumption failed
  kInvariant = 3,     // a checked property was falsified
  kBudget = 4,        // enumeration / step budget exhausted
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const { return kind_; }
  int exit_code() const { return static_cast<int>(kind_); }

 private:
  ErrorKind kind_;
};

class UsageError : public Error {
 public:
  explicit UsageError(const std::string& what) : Error(ErrorKind::kUsage, what) {}
};

class PreconditionError : public Error {
 public:
  explicit PreconditionError(const std::string& what)
      : Error(ErrorKind::kPrecondition, what) {}
};

class InvariantError : public Error {
 public:
  explicit InvariantError(const std::string& what)
      : Error(ErrorKind::kInvariant, what) {}
};

class BudgetExceeded : public Error {
 public:
  BudgetExceeded(const std::string& what, std::uint64_t required)
      : Error(ErrorKind::kBudget, what), required_(required) {}

  // Budget that would have sufficed (saturates at UINT64_MAX).
  std::uint64_t required() const { return required_; }

 private:
  std::uint64_t required_;
};

}  // namespace coingame
