#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace smlab {

enum class ErrorKind {
  InvalidStochasticMatrix,
  MissingSojournLaw,
  InvalidKernel,
  InvalidSojournLaw,
  NotIrreducible,
  PeriodicChain,
  HorizonExceeded,
  InvalidArgument,
  QuadratureFailure,
  TooFewSamples,
  ParseError,
  SchemaError,
};

std::string_view to_string(ErrorKind kind);

// Base for every error raised by the library. The kind is stable and is what
// tests and the CLI switch on; the message is for humans.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

// Configuration parse failure with a 1-based source position.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, int line, int column)
      : Error(ErrorKind::ParseError,
              what + " (line " + std::to_string(line) + ", column " + std::to_string(column) + ")"),
        line_(line),
        column_(column) {}

  int line() const noexcept { return line_; }
  int column() const noexcept { return column_; }

 private:
  int line_;
  int column_;
};

class SchemaError : public Error {
 public:
  SchemaError(std::string field, const std::string& what)
      : Error(ErrorKind::SchemaError, field + ": " + what), field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace smlab
