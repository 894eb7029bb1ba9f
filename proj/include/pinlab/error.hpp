#pragma once

#include <stdexcept>
#include <string>

namespace pinlab {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A model parameter lies outside its admissible domain (alpha <= 0, n_max < 2, ...).
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// A function argument lies outside the mathematical domain of the function.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// The requested contact density cannot be realized as a tilted mean.
class DensityOutOfRange : public Error {
 public:
  using Error::Error;
};

/// A table or enumeration would exceed the configured size or memory cap.
class CapacityError : public Error {
 public:
  using Error::Error;
};

/// An exponent fit window cannot be realized under the current truncation.
class FitWindowError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  ConfigError(std::string field, const std::string& what)
      : Error(field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

}  // namespace pinlab
