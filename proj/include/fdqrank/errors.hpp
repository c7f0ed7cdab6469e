#pragma once

#include <stdexcept>
#include <string>

namespace fdq {

/// Error categories. The numeric values double as CLI exit codes and as the
/// status codes of the C API.
enum class ErrorCode : int {
  ok = 0,
  usage = 1,      // bad arguments, parse errors, malformed files
  resource = 2,   // degree/term/dimension caps exceeded
  numerical = 3,  // backend failure
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

class UsageError : public Error {
 public:
  explicit UsageError(const std::string& what) : Error(ErrorCode::usage, what) {}
};

/// Parse failure with a source position (1-based line and column).
class ParseError : public Error {
 public:
  ParseError(const std::string& source, int line, int column, const std::string& msg)
      : Error(ErrorCode::usage,
              source + ":" + std::to_string(line) + ":" + std::to_string(column) + ": " + msg),
        line_(line),
        column_(column) {}
  int line() const noexcept { return line_; }
  int column() const noexcept { return column_; }

 private:
  int line_;
  int column_;
};

class LoadError : public Error {
 public:
  explicit LoadError(const std::string& what) : Error(ErrorCode::usage, what) {}
};

class ResourceError : public Error {
 public:
  explicit ResourceError(const std::string& what) : Error(ErrorCode::resource, what) {}
};

class NumericalError : public Error {
 public:
  explicit NumericalError(const std::string& what) : Error(ErrorCode::numerical, what) {}
};

}  // namespace fdq
