#pragma once

#include <stdexcept>
#include <string>

namespace talbot {

/// Argument outside the physical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Invalid numerical or run configuration. The message carries the key path
/// of the offending entry when one is known.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A scan does not span or sample enough of the fringe period to be fitted.
class InsufficientDataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The velocity selector transmits nothing for the requested geometry.
class EmptyBandError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The direct Fresnel integral did not converge or disagreed with the
/// Fourier-coefficient route.
class OracleFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace talbot
