#pragma once

#include <stdexcept>
#include <string>

namespace scrible {

/// Query point is not strictly inside the body.
class DomainError : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

/// Malformed argument (asymmetric matrix, dimension mismatch, ...).
class ArgumentError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Numerical breakdown, e.g. a Hessian that is not positive definite.
class NumericError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class ConvergenceError : public std::runtime_error {
public:
  ConvergenceError(const std::string& what, double last_decrement)
      : std::runtime_error(what), last_decrement_(last_decrement) {}

  double last_decrement() const noexcept { return last_decrement_; }

private:
  double last_decrement_;
};

/// A desk-scale guard (vertex count, path count, branch count) was exceeded.
class SizeError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// An environment broke its declared contract (loss bound, path delay bound).
class ContractError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A sampled prediction left the closed body; the barrier or basis is broken.
class GeometryError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Bad input data (flow conservation, negative delays, malformed files).
class InputError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace scrible
