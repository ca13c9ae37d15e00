#pragma once

#include <stdexcept>
#include <string>

namespace smoothcd {

// Bad arguments: dimension mismatch, out-of-range constants.
class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Invalid combination of problem and method, e.g. gamma * L >= 1.
class ConfigurationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A constraint set is empty.
class InfeasibleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class FactorizationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// NaN/Inf or a failed internal certificate during a solve.
class NumericalFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace smoothcd
