#pragma once

#include <cstdint>
#include <limits>

#include "cbopt/linalg.hpp"
#include "cbopt/oracle.hpp"

namespace cbopt {

enum class SamplingMode {
  // n = ceil(2 * c_h * sigma^2 * ln T / gamma^2); with c_h = 2 the subgaussian
  // tail gives P(|mean - f| >= gamma) <= 2/T^2.
  Calibrated,
  // n = ceil(2 * sigma * ln T / gamma^2), the literal count, dimensionally odd
  // but kept behind this switch for comparison runs. Disables sample reuse.
  PaperLiteral,
};

struct SamplingPlan {
  SamplingMode mode = SamplingMode::Calibrated;
  double hoeffding_const = 2.0;
  bool reuse_samples = true;
  double sigma = 0.0;
  std::uint64_t horizon = 2;

  std::uint64_t required_samples(double gamma) const;
};

std::uint64_t required_samples(double gamma, double sigma, std::uint64_t horizon,
                               SamplingMode mode = SamplingMode::Calibrated,
                               double hoeffding_const = 2.0);

// Running average and confidence interval for one repeatedly queried point.
// `level` is the nominal CI half-width gamma the estimate has been refined to.
struct PointEstimate {
  Vec point;
  double sum = 0.0;
  std::uint64_t n = 0;
  double level = std::numeric_limits<double>::infinity();

  explicit PointEstimate(Vec p) : point(std::move(p)) {}
  PointEstimate() = default;

  double mean() const { return sum / static_cast<double>(n); }
  double lb() const { return mean() - level; }
  double ub() const { return mean() + level; }
  // CI bounds read at a coarser level than the estimate was refined to; valid
  // because extra samples only tighten the tail.
  double lb_at(double gamma) const { return mean() - gamma; }
  double ub_at(double gamma) const { return mean() + gamma; }
};

// Queries the oracle until the estimate holds at `target_gamma`, reusing prior
// samples when the plan allows. On budget exhaustion the partial samples stay
// in the estimate and the error propagates.
void refine(PointEstimate& estimate, QueryHandle& oracle, double target_gamma,
            const SamplingPlan& plan);

// Extra queries refine() would issue right now; lets callers gate on budget.
std::uint64_t refine_cost(const PointEstimate& estimate, double target_gamma,
                          const SamplingPlan& plan);

// True iff the two CIs are gamma-separated (non-strict inequalities).
bool separated(const PointEstimate& a, const PointEstimate& b, double gamma);

}  // namespace cbopt
