#pragma once

#include <stdexcept>
#include <string>

namespace ehub {

/// Bad input data: malformed files, invalid specs, inconsistent series.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SpecError : public DataError {
 public:
  using DataError::DataError;
};

/// Syntax error in an input file, located by line and column (1-based).
class ParseError : public DataError {
 public:
  ParseError(const std::string& origin, int line, int column, const std::string& what)
      : DataError(origin + ":" + std::to_string(line) + ":" + std::to_string(column) + ": " + what),
        line_(line),
        column_(column) {}
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

}  // namespace ehub
