#include "ctables/error.hpp"

namespace ctables {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidInput: return "InvalidInput";
    case ErrorKind::AxisOutOfRange: return "AxisOutOfRange";
    case ErrorKind::MismatchedTotals: return "MismatchedTotals";
    case ErrorKind::NegativeEntry: return "NegativeEntry";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::BudgetExceeded: return "BudgetExceeded";
    case ErrorKind::EmptyFiber: return "EmptyFiber";
    case ErrorKind::DomainError: return "DomainError";
    case ErrorKind::ZeroMargin: return "ZeroMargin";
    case ErrorKind::NotConverged: return "NotConverged";
    case ErrorKind::UnbalancedMargins: return "UnbalancedMargins";
  }
  return "Unknown";
}

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NotConverged: return 3;
    case ErrorKind::BudgetExceeded: return 4;
    default: return 2;
  }
}

}  // namespace ctables
