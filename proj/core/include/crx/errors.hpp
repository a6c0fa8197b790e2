#pragma once

#include <stdexcept>
#include <string>

namespace crx {

/// Raised when an input violates a hard problem constraint (spacing, region,
/// displacement budget, power budget).
class ConstraintViolation : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Coincident antenna elements or otherwise ill-posed array geometry.
class GeometryError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// The target angle is not identifiable from the current precoder and array.
class UnobservableError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// NaN or Inf encountered while training.
class DivergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Misuse of a stateful protocol, e.g. stepping a finished episode.
class ProtocolError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Inconsistent or malformed configuration.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace crx
