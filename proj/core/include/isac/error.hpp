#pragma once

#include <stdexcept>
#include <string>

namespace isac {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Alphabet is empty or contains non-finite points.
class InvalidAlphabet : public Error {
 public:
  using Error::Error;
};

/// A numeric argument is outside its documented domain.
class InvalidParameter : public Error {
 public:
  using Error::Error;
};

/// A target violates the cyclic-prefix or ICI-negligibility condition.
class ScenarioInfeasible : public Error {
 public:
  using Error::Error;
};

/// The time-domain reference channel was asked for an unsupported delay.
class OracleDomainError : public Error {
 public:
  using Error::Error;
};

/// Random scene generation could not satisfy the separation constraint.
class SceneGenerationError : public Error {
 public:
  using Error::Error;
};

/// Malformed or inconsistent scenario configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace isac
