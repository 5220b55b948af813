#pragma once

#include <stdexcept>
#include <string>

namespace bnf {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& message)
      : std::runtime_error(message), code_(std::move(code)) {}

  /// Short machine-readable code, e.g. "parse_error" or "budget_exceeded".
  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& message, std::size_t line, std::size_t column)
      : Error("parse_error", "line " + std::to_string(line) + ", column " +
                                 std::to_string(column) + ": " + message),
        line_(line),
        column_(column) {}

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

class InvalidArgument : public Error {
 public:
  explicit InvalidArgument(const std::string& message) : Error("invalid_argument", message) {}
};

class BudgetExceeded : public Error {
 public:
  explicit BudgetExceeded(const std::string& message) : Error("budget_exceeded", message) {}
};

/// Raised when an operation is called outside its precondition,
/// e.g. asking for a Duplicator reply in a position Duplicator loses.
class ContractViolation : public Error {
 public:
  explicit ContractViolation(const std::string& message) : Error("contract_violation", message) {}
};

}  // namespace bnf
