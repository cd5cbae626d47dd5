#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace mme {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid configuration. `field()` is the dotted path of the offending entry.
class ConfigError : public Error {
 public:
  ConfigError(std::string field, const std::string& what)
      : Error(field + ": " + what), field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

/// Numerical domain violation (v >= c, empty tallies, degenerate geometry...).
class DomainError : public Error {
 public:
  using Error::Error;
};

class EmptyTallyError : public DomainError {
 public:
  EmptyTallyError() : DomainError("tally has no post-selected coincidences") {}
};

class DegenerateGeometryError : public DomainError {
 public:
  using DomainError::DomainError;
};

}  // namespace mme
