#pragma once

#include <stdexcept>
#include <string>

namespace crn {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed network document. Line and column are 1-based; 0 means unknown.
class ParseError : public Error {
 public:
  ParseError(const std::string& message, int line, int column)
      : Error(format(message, line, column)),
        detail_(message),
        line_(line),
        column_(column) {}

  const std::string& detail() const { return detail_; }
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  static std::string format(const std::string& message, int line, int column) {
    if (line <= 0) return message;
    return "line " + std::to_string(line) + ", column " + std::to_string(column) +
           ": " + message;
  }

  std::string detail_;
  int line_;
  int column_;
};

// Violated precondition (bad argument, unsupported kinetics, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

// Iterative method failed or a linear system was singular.
class NumericalError : public Error {
 public:
  using Error::Error;
};

// Two checks that must agree mathematically disagreed; indicates a bug.
class ConsistencyError : public Error {
 public:
  using Error::Error;
};

}  // namespace crn
