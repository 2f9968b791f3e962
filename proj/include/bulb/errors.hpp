#pragma once

#include <stdexcept>
#include <string>

namespace bulb {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on an argument was violated (bad grid, wrong parameter range, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Invalid experiment configuration; `field` names the offending key path.
class ConfigError : public Error {
 public:
  ConfigError(std::string field, const std::string& what)
      : Error(field.empty() ? what : field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

/// The numerical state became unusable (NaN/Inf, lost resolution).
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// A file could not be read or written, or its contents are malformed.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace bulb
