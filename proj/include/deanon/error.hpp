#pragma once

#include <stdexcept>
#include <string>

namespace deanon {

/// Bad input: parameters, graphs or matchings that violate a documented contract.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// The requested enumeration would exceed the configured search budget.
class BudgetExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace deanon
