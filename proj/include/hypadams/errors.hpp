#pragma once

#include <stdexcept>
#include <string>

namespace hypadams {

// Root of all numerical failures raised by the library.
class NumericalError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class NonConvergent : public NumericalError {
public:
  using NumericalError::NumericalError;
};

class NonFinite : public NumericalError {
public:
  using NumericalError::NumericalError;
};

class NotMonotone : public NumericalError {
public:
  using NumericalError::NumericalError;
};

// Argument outside the mathematical domain (e.g. alpha < -9/4, rho <= 0).
class DomainError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

// exp_functional with mode "none" on the infinite-volume measure.
class DivergentMode : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

class ConstraintViolated : public NumericalError {
public:
  using NumericalError::NumericalError;
};

[[noreturn]] void throw_domain(const std::string& what);

} // namespace hypadams
