#include "cbopt/bandit1d.hpp"

#include <algorithm>
#include <cmath>

#include "cbopt/errors.hpp"

namespace cbopt {

const char* to_string(Case1D c) {
  switch (c) {
    case Case1D::Case1Left: return "case1-left";
    case Case1D::Case1Right: return "case1-right";
    case Case1D::Case2Left: return "case2-left";
    case Case1D::Case2Right: return "case2-right";
    case Case1D::Continue: return "continue";
  }
  return "?";
}

const char* to_string(EpochOutcome1D c) {
  switch (c) {
    case EpochOutcome1D::Case1Left: return "case1-left";
    case EpochOutcome1D::Case1Right: return "case1-right";
    case EpochOutcome1D::Case2Left: return "case2-left";
    case EpochOutcome1D::Case2Right: return "case2-right";
    case EpochOutcome1D::BudgetStop: return "budget-stop";
  }
  return "?";
}

Case1D classify_interval(const PointEstimate& left, const PointEstimate& center,
                         const PointEstimate& right, double gamma) {
  if (left.level != center.level || center.level != right.level)
    throw PreconditionError("classify_interval: estimates at different levels");

  const double max_outer_lb = std::max(left.lb(), right.lb());
  const bool drop_left = left.lb() >= right.lb();

  if (max_outer_lb >= std::min(left.ub(), right.ub()) + gamma)
    return drop_left ? Case1D::Case1Left : Case1D::Case1Right;
  if (max_outer_lb >= center.ub() + gamma)
    return drop_left ? Case1D::Case2Left : Case1D::Case2Right;
  return Case1D::Continue;
}

namespace {

EpochOutcome1D to_epoch_outcome(Case1D c) {
  switch (c) {
    case Case1D::Case1Left: return EpochOutcome1D::Case1Left;
    case Case1D::Case1Right: return EpochOutcome1D::Case1Right;
    case Case1D::Case2Left: return EpochOutcome1D::Case2Left;
    case Case1D::Case2Right: return EpochOutcome1D::Case2Right;
    case Case1D::Continue: break;
  }
  return EpochOutcome1D::BudgetStop;
}

}  // namespace

Result1D run_1d(QueryHandle& oracle, const Options1D& options) {
  if (options.horizon < 2) throw PreconditionError("run_1d: horizon must be >= 2");
  const SamplingPlan& plan = options.plan;
  if (plan.horizon != options.horizon)
    throw PreconditionError("run_1d: sampling plan horizon mismatch");
  if (3 * plan.required_samples(0.5) > options.horizon)
    throw PreconditionError("run_1d: budget below one round at gamma = 1/2");

  Result1D result;
  Interval1D interval;
  std::string stop;

  for (std::uint32_t epoch = 1; stop.empty(); ++epoch) {
    if (interval.width() < options.width_floor) {
      stop = "width-floor";
      break;
    }

    PointEstimate est_l(vec1(interval.x_left()));
    PointEstimate est_c(vec1(interval.x_center()));
    PointEstimate est_r(vec1(interval.x_right()));
    EpochRecord1D epoch_rec;
    epoch_rec.epoch = epoch;
    epoch_rec.l = interval.l;
    epoch_rec.r = interval.r;
    epoch_rec.width = interval.width();
    bool epoch_done = false;

    for (std::uint32_t round = 1; !epoch_done; ++round) {
      if (round > options.max_rounds_per_epoch) {
        stop = "round-cap";
        break;
      }
      const double gamma = std::ldexp(1.0, -static_cast<int>(round));
      const std::uint64_t cost = refine_cost(est_l, gamma, plan) +
                                 refine_cost(est_c, gamma, plan) +
                                 refine_cost(est_r, gamma, plan);
      if (cost > oracle.remaining()) {
        stop = "budget-gate";
        break;
      }

      RoundRecord round_rec;
      round_rec.epoch = epoch;
      round_rec.round = round;
      round_rec.gamma = gamma;
      const std::uint64_t before = oracle.queries_used();
      try {
        refine(est_l, oracle, gamma, plan);
        refine(est_c, oracle, gamma, plan);
        refine(est_r, oracle, gamma, plan);
      } catch (const BudgetExhausted&) {
        stop = "budget-exhausted";
        round_rec.new_queries = oracle.queries_used() - before;
        if (round_rec.new_queries > 0) {
          round_rec.first_query = before + 1;
          round_rec.last_query = oracle.queries_used();
        }
        result.rounds.push_back(round_rec);
        break;
      }
      round_rec.new_queries = oracle.queries_used() - before;
      if (round_rec.new_queries > 0) {
        round_rec.first_query = before + 1;
        round_rec.last_query = oracle.queries_used();
      }

      const Case1D decision = classify_interval(est_l, est_c, est_r, gamma);
      round_rec.continued = decision == Case1D::Continue;
      round_rec.ended_epoch = !round_rec.continued;
      result.rounds.push_back(round_rec);

      if (decision == Case1D::Continue) continue;

      // Case 1 and Case 2 discard the same quartile; only the certificate
      // behind the discard differs.
      if (decision == Case1D::Case1Left || decision == Case1D::Case2Left)
        interval.l = interval.x_left();
      else
        interval.r = interval.x_right();

      epoch_rec.final_round = round;
      epoch_rec.final_gamma = gamma;
      epoch_rec.outcome = to_epoch_outcome(decision);
      epoch_done = true;
    }

    if (!epoch_done) {
      // Partial epoch cut short by budget or guards.
      epoch_rec.final_round = 0;
      epoch_rec.final_gamma = 0.0;
      epoch_rec.outcome = EpochOutcome1D::BudgetStop;
    }
    result.epochs.push_back(epoch_rec);
  }

  result.final_interval = interval;
  result.recommendation = interval.x_center();
  result.stop_reason = stop;
  result.queries_used = oracle.queries_used();
  return result;
}

}  // namespace cbopt
