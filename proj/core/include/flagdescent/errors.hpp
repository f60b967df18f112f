#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace flagdescent {

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An enumeration or search would exceed the configured budget.
class BudgetError : public Error {
 public:
  using Error::Error;
};

/// A documented precondition was violated by the caller.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// Hard limits for exhaustive enumeration.  Budgets are strict: nothing
/// silently downgrades from exhaustive to sampled when a budget is hit,
/// the operation fails with BudgetError instead.
struct Budget {
  std::uint64_t max_field_cardinality = 1u << 16;
  std::uint64_t max_items = 1ull << 22;

  void check_field(std::uint64_t q) const {
    if (q > max_field_cardinality) {
      throw BudgetError("field cardinality " + std::to_string(q) +
                        " exceeds budget " + std::to_string(max_field_cardinality));
    }
  }
  void check_items(std::uint64_t n, const char* what) const {
    if (n > max_items) {
      throw BudgetError(std::string(what) + ": " + std::to_string(n) +
                        " items exceed budget " + std::to_string(max_items));
    }
  }
};

}  // namespace flagdescent
