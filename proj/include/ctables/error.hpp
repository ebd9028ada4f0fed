#pragma once

#include <stdexcept>
#include <string>

namespace ctables {

enum class ErrorKind {
  InvalidInput,
  AxisOutOfRange,
  MismatchedTotals,
  NegativeEntry,
  DimensionMismatch,
  BudgetExceeded,
  EmptyFiber,
  DomainError,
  ZeroMargin,
  NotConverged,
  UnbalancedMargins,
};

const char* to_string(ErrorKind kind);

// CLI exit code for an error kind: 2 invalid input, 3 not converged,
// 4 budget exceeded.
int exit_code(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace ctables
