#pragma once

#include <stdexcept>
#include <string>

namespace mmsurf {

/// Input text could not be parsed (bad number, missing file, ...).
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, int line = 0)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

/// Parsed value violates a domain rule (non-positive radius, ...).
class ValidationError : public ParseError {
 public:
  using ParseError::ParseError;
};

class LookupError : public std::runtime_error {
 public:
  explicit LookupError(const std::string& key)
      : std::runtime_error("unknown element symbol '" + key + "'"), key_(key) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

/// Argument outside the domain of an operation (empty molecule, degenerate box, ...).
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Two grids (or a grid and a mask) do not share the same GridSpec.
class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Inconsistent solver configuration (kernel spacing differs from grid spacing, ...).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Non-finite intermediate or a violated stability bound.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace mmsurf
