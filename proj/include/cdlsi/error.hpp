#pragma once

#include <stdexcept>
#include <string>

namespace cdlsi {

/// Base class of every error raised by the library. `category()` is a short
/// machine-readable tag used by the command-line tool when reporting failures.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  [[nodiscard]] virtual const char* category() const noexcept { return "error"; }
};

class DimensionError : public Error {
 public:
  using Error::Error;
  [[nodiscard]] const char* category() const noexcept override { return "dimension"; }
};

class ParameterError : public Error {
 public:
  using Error::Error;
  [[nodiscard]] const char* category() const noexcept override { return "parameter"; }
};

class ParseError : public Error {
 public:
  using Error::Error;
  [[nodiscard]] const char* category() const noexcept override { return "parse"; }
};

class ConfigError : public Error {
 public:
  using Error::Error;
  [[nodiscard]] const char* category() const noexcept override { return "config"; }
};

class IoError : public Error {
 public:
  using Error::Error;
  [[nodiscard]] const char* category() const noexcept override { return "io"; }
};

class ValidationError : public Error {
 public:
  using Error::Error;
  [[nodiscard]] const char* category() const noexcept override { return "validation"; }
};

}  // namespace cdlsi
