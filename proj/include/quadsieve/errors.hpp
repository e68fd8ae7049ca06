#pragma once

#include <stdexcept>
#include <string>

namespace quadsieve {

/// Base for every error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A documented precondition of an operation does not hold.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// Input larger than the documented desk-scale bound.
class UnsupportedSizeError : public Error {
 public:
  using Error::Error;
};

class NoSolutionError : public Error {
 public:
  using Error::Error;
};

class InconsistencyError : public Error {
 public:
  using Error::Error;
};

/// A character or stage failed one of its structural checks.
class ValidationError : public Error {
 public:
  ValidationError(std::string check, const std::string& detail)
      : Error("validation failed [" + check + "]: " + detail),
        check_(std::move(check)) {}

  const std::string& check() const noexcept { return check_; }

 private:
  std::string check_;
};

class PipelineError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Numerical result could not be certified at the requested precision.
class PrecisionError : public Error {
 public:
  using Error::Error;
};

}  // namespace quadsieve
