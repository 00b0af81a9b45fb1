#pragma once

#include <stdexcept>
#include <string>

namespace mimcav {

/// Input outside the domain of an operation (bad grid, negative length, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Round-trip factor with |mu| >= 1: the cavity sum does not converge.
class DivergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A response denominator vanished.
class SingularityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed data file or configuration.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace mimcav
