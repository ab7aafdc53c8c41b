#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cbopt/confint.hpp"
#include "cbopt/oracle.hpp"
#include "cbopt/trace.hpp"

namespace cbopt {

// Working feasible region [l, r] with the three equally spaced probe points.
struct Interval1D {
  double l = 0.0;
  double r = 1.0;

  double width() const { return r - l; }
  double x_left() const { return l + width() / 4.0; }
  double x_center() const { return l + width() / 2.0; }
  double x_right() const { return l + 3.0 * width() / 4.0; }
};

// "Left"/"Right" name the discarded quartile: Case1Left drops [l, x_l].
enum class Case1D { Case1Left, Case1Right, Case2Left, Case2Right, Continue };

enum class EpochOutcome1D {
  Case1Left,
  Case1Right,
  Case2Left,
  Case2Right,
  BudgetStop,
};

const char* to_string(Case1D c);
const char* to_string(EpochOutcome1D c);

// Three-way case split of one round. Ties LB(x_l) = LB(x_r) discard left.
Case1D classify_interval(const PointEstimate& left, const PointEstimate& center,
                         const PointEstimate& right, double gamma);

struct EpochRecord1D {
  std::uint32_t epoch = 0;
  double l = 0.0;
  double r = 1.0;
  double width = 0.0;
  std::uint32_t final_round = 0;
  double final_gamma = 0.0;
  EpochOutcome1D outcome = EpochOutcome1D::BudgetStop;
};

struct Options1D {
  std::uint64_t horizon = 0;  // T: analysis parameter and query budget
  SamplingPlan plan;
  double width_floor = 1e-12;  // stop once probe points are numerically equal
  std::uint32_t max_rounds_per_epoch = 64;
};

struct Result1D {
  std::vector<EpochRecord1D> epochs;
  std::vector<RoundRecord> rounds;
  Interval1D final_interval;
  double recommendation = 0.5;  // midpoint of the last working region
  std::string stop_reason;
  std::uint64_t queries_used = 0;
};

// Epoch/round loop over a shrinking interval with the center-point device.
// Terminates when the next round no longer fits in the remaining budget.
Result1D run_1d(QueryHandle& oracle, const Options1D& options);

}  // namespace cbopt
