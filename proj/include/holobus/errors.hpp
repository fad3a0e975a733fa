#pragma once

#include <stdexcept>
#include <string>

namespace holobus {

// Bad arguments or configuration (even chain length, negative field, ...).
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A dense realization would exceed the configured site cap.
class ResourceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Integrator failed its step-halving contract.
class AccuracyError : public std::runtime_error {
 public:
  AccuracyError(const std::string& what, double measured)
      : std::runtime_error(what), measured_(measured) {}
  double measured() const noexcept { return measured_; }

 private:
  double measured_;
};

// Protocol preconditions on the initial eigenstructure failed
// (e.g. a degenerate chain ground state).
class SetupError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Function evaluated at a point where it is not defined.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

}  // namespace holobus
