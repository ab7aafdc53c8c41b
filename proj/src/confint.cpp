#include "cbopt/confint.hpp"

#include <cmath>

#include "cbopt/errors.hpp"

namespace cbopt {

std::uint64_t required_samples(double gamma, double sigma, std::uint64_t horizon,
                               SamplingMode mode, double hoeffding_const) {
  if (!(gamma > 0.0)) throw PreconditionError("required_samples: gamma must be > 0");
  if (horizon < 2) throw PreconditionError("required_samples: horizon must be >= 2");
  const double log_t = std::log(static_cast<double>(horizon));
  double raw = 0.0;
  switch (mode) {
    case SamplingMode::Calibrated:
      raw = 2.0 * hoeffding_const * sigma * sigma * log_t / (gamma * gamma);
      break;
    case SamplingMode::PaperLiteral:
      raw = 2.0 * sigma * log_t / (gamma * gamma);
      break;
  }
  const double count = std::ceil(raw);
  return count < 1.0 ? 1 : static_cast<std::uint64_t>(count);
}

std::uint64_t SamplingPlan::required_samples(double gamma) const {
  return cbopt::required_samples(gamma, sigma, horizon, mode, hoeffding_const);
}

std::uint64_t refine_cost(const PointEstimate& estimate, double target_gamma,
                          const SamplingPlan& plan) {
  if (!plan.reuse_samples) {
    if (estimate.n > 0 && target_gamma == estimate.level) return 0;
    return plan.required_samples(target_gamma);
  }
  if (estimate.n > 0 && target_gamma >= estimate.level) return 0;
  const std::uint64_t want = plan.required_samples(target_gamma);
  return want > estimate.n ? want - estimate.n : 0;
}

void refine(PointEstimate& estimate, QueryHandle& oracle, double target_gamma,
            const SamplingPlan& plan) {
  if (!plan.reuse_samples) {
    // Literal sampling: every (point, level) pair is sampled from scratch.
    if (estimate.n > 0 && target_gamma == estimate.level) return;
    estimate.sum = 0.0;
    estimate.n = 0;
  } else if (estimate.n > 0 && target_gamma >= estimate.level) {
    return;  // already at least this tight
  }

  const std::uint64_t want = plan.required_samples(target_gamma);
  while (estimate.n < want) {
    estimate.sum += oracle.observe(estimate.point);
    estimate.n += 1;
  }
  estimate.level = target_gamma;
}

bool separated(const PointEstimate& a, const PointEstimate& b, double gamma) {
  if (a.level != b.level)
    throw PreconditionError("separated: estimates are at different levels");
  return a.lb() >= b.ub() + gamma || b.lb() >= a.ub() + gamma;
}

}  // namespace cbopt
