#pragma once

#include <stdexcept>
#include <string>

namespace hsvar {

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A factorization or iteration failed on otherwise valid input.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The prior makes the Savage-Dickey ratio degenerate (unbounded ordinate).
class VerificationInfeasible : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Two equations share a variance pattern, so the requested column is only
/// determined up to a rotation.
class IdentificationAmbiguous : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Malformed configuration, input file or artifact.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace hsvar
