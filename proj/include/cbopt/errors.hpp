#pragma once

#include <stdexcept>
#include <string>

namespace cbopt {

// Query point lies outside the objective's domain.
struct DomainViolation : std::runtime_error {
  explicit DomainViolation(const std::string& what) : std::runtime_error(what) {}
};

// The configured query budget is spent; algorithms must wind down cleanly.
struct BudgetExhausted : std::runtime_error {
  explicit BudgetExhausted(const std::string& what) : std::runtime_error(what) {}
};

// A geometric construction has no valid output for the given configuration
// (degenerate cone, cut that would not shrink the ellipsoid, ...).
struct GeometricFailure : std::runtime_error {
  explicit GeometricFailure(const std::string& what) : std::runtime_error(what) {}
};

// Shape matrix too ill-conditioned to round.
struct ConditioningError : std::runtime_error {
  explicit ConditioningError(const std::string& what) : std::runtime_error(what) {}
};

// Caller violated a documented precondition (mismatched CI levels, bad constants).
struct PreconditionError : std::invalid_argument {
  explicit PreconditionError(const std::string& what) : std::invalid_argument(what) {}
};

}  // namespace cbopt
