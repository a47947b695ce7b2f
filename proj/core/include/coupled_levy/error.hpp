#pragma once

#include <stdexcept>
#include <string>

namespace coupled_levy {

/// Argument outside the mathematical domain of an operation (e.g. a
/// probability level outside (0,1), a negative distance).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A structural precondition of a construction does not hold, such as
/// stochastic domination or connected super-level sets. `witness()` holds a
/// location where the violation was observed, when one is available.
class PreconditionError : public std::invalid_argument {
 public:
  explicit PreconditionError(const std::string& what, double witness = 0.0)
      : std::invalid_argument(what), witness_(witness) {}

  double witness() const noexcept { return witness_; }

 private:
  double witness_;
};

/// Malformed configuration or input document.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace coupled_levy
