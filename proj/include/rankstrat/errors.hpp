#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace rankstrat {

enum class ErrorKind {
  MissingParameter,
  ConfigError,
  DataError,
  ParseError,
  SchemaError,
  DimensionError,
  DegenerateInput,
  InvalidSplit,
  EmptyInput,
  NoSupport,
  NoPath,
  IoError,
};

std::string_view to_string(ErrorKind kind);

/// Base of every error raised by the library. `kind()` is what the CLI
/// reports in its machine-readable error object.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

template <ErrorKind K>
class KindedError : public Error {
 public:
  explicit KindedError(const std::string& message) : Error(K, message) {}
};

using MissingParameter = KindedError<ErrorKind::MissingParameter>;
using ConfigError = KindedError<ErrorKind::ConfigError>;
using DataError = KindedError<ErrorKind::DataError>;
using SchemaError = KindedError<ErrorKind::SchemaError>;
using DimensionError = KindedError<ErrorKind::DimensionError>;
using DegenerateInput = KindedError<ErrorKind::DegenerateInput>;
using InvalidSplit = KindedError<ErrorKind::InvalidSplit>;
using EmptyInput = KindedError<ErrorKind::EmptyInput>;
using NoSupport = KindedError<ErrorKind::NoSupport>;
using NoPath = KindedError<ErrorKind::NoPath>;
using IoError = KindedError<ErrorKind::IoError>;

/// Malformed CSV content; carries the 1-based line number.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& message)
      : Error(ErrorKind::ParseError, "line " + std::to_string(line) + ": " + message),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Throws the error type matching `kind`, so context can be added to a
/// caught error without changing what callers catch.
[[noreturn]] void raise(ErrorKind kind, const std::string& message);

}  // namespace rankstrat
