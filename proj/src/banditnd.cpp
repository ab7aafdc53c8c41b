#include "cbopt/banditnd.hpp"

#include <algorithm>
#include <cmath>

#include "cbopt/errors.hpp"

namespace cbopt {

void Thresholds::validate(bool theory_mode) const {
  if (dim < 2) throw PreconditionError("thresholds: dimension must be >= 2");
  if (!(c2 > 0.0 && c2 < 1.0)) throw PreconditionError("thresholds: need 0 < c2 < 1");
  if (theory_mode) {
    if (c1 < 64.0 || c2 > 1.0 / 32.0)
      throw PreconditionError("thresholds: theory mode needs c1 >= 64 and c2 <= 1/32");
  } else if (c1 < 1.0) {
    throw PreconditionError("thresholds: c1 must be >= 1");
  }
}

const char* to_string(CaseND c) {
  switch (c) {
    case CaseND::Case1a: return "case1a";
    case CaseND::Case1b: return "case1b";
    case CaseND::Case2a: return "case2a";
    case CaseND::Case2b: return "case2b";
  }
  return "?";
}

PyramidClassification classify_pyramid(const PointEstimate& apex,
                                       const PointEstimate& center,
                                       const std::vector<PointEstimate>& vertices,
                                       double gamma_hat, const Thresholds& thresholds) {
  if (apex.n == 0 || center.n == 0) throw PreconditionError("classify_pyramid: empty estimate");
  if (apex.level > gamma_hat || center.level > gamma_hat)
    throw PreconditionError("classify_pyramid: estimate coarser than gamma_hat");
  for (const auto& v : vertices)
    if (v.n == 0 || v.level > gamma_hat)
      throw PreconditionError("classify_pyramid: estimate coarser than gamma_hat");

  // TOP/BOTTOM over apex (index 0) and base vertices; ties to the lowest index.
  int top = 0, bottom = 0;
  double top_lb = apex.lb_at(gamma_hat), bottom_lb = top_lb;
  for (std::size_t i = 0; i < vertices.size(); ++i) {
    const double lb = vertices[i].lb_at(gamma_hat);
    if (lb > top_lb) {
      top_lb = lb;
      top = static_cast<int>(i) + 1;
    }
    if (lb < bottom_lb) {
      bottom_lb = lb;
      bottom = static_cast<int>(i) + 1;
    }
  }
  const auto& bottom_est = bottom == 0 ? apex : vertices[bottom - 1];

  const double delta = thresholds.delta(gamma_hat);
  const double delta_bar = thresholds.delta_bar(gamma_hat);
  const bool top_separated = top_lb >= bottom_est.ub_at(gamma_hat) + delta;
  const bool above_apex = top_lb >= apex.ub_at(gamma_hat) + gamma_hat;
  const bool center_high = center.ub_at(gamma_hat) >= bottom_lb - delta_bar;

  const bool p1a = top_separated && above_apex;
  const bool p1b = top_separated && !above_apex;
  const bool p2a = !top_separated && center_high;
  const bool p2b = !top_separated && !center_high;
  if (p1a + p1b + p2a + p2b != 1)
    throw std::logic_error("classify_pyramid: cases not mutually exclusive");

  PyramidClassification out;
  out.top = top;
  out.bottom = bottom;
  out.decision = p1a ? CaseND::Case1a : p1b ? CaseND::Case1b : p2a ? CaseND::Case2a : CaseND::Case2b;
  return out;
}

geo::Pyramid hat_raising(const geo::Pyramid& p) {
  geo::Pyramid raised;
  raised.apex = p.apex + (p.apex - p.centroid());
  raised.base = p.base;
  return raised;
}

ConeCutResult cone_cutting(const geo::Pyramid& p, const geo::Ellipsoid& ball) {
  const int d = p.dim();
  const double radius = std::sqrt(ball.shape(0, 0));
  const geo::Cone cone = geo::cone_of(p);

  ConeCutResult result;
  try {
    const geo::CapCut cut = geo::cap_halfspace_for_cone(cone, ball);
    // A cap deeper than the center is clamped to a central cut; the removed
    // half-ball is still inside the proven cap.
    const double alpha_used = std::max(cut.alpha, 0.0);
    if (alpha_used >= (1.0 - 1e-9) / d)
      throw GeometricFailure("cone_cutting: cap too shallow for a shrinking update");
    const geo::Halfspace hs{cut.halfspace.normal,
                            cut.halfspace.normal.dot(ball.center) + alpha_used * radius};
    result.next = geo::shallow_cut_update(ball, hs, -alpha_used);
    result.alpha = alpha_used;
  } catch (const GeometricFailure&) {
    const Vec u = -p.axis();
    const geo::Halfspace hs{u, u.dot(ball.center)};
    result.next = geo::shallow_cut_update(ball, hs, 0.0);
    result.alpha = 0.0;
    result.fallback = true;
  }
  result.volume_ratio =
      std::sqrt(result.next.shape.determinant() / ball.shape.determinant());
  return result;
}

namespace {

// Forwards queries after mapping isotropic coordinates back to the original
// space and clamping onto the domain.
class MappedHandle final : public QueryHandle {
 public:
  MappedHandle(QueryHandle& inner, const geo::AffineMap& from_iso, const Domain& domain)
      : inner_(inner), from_iso_(from_iso), domain_(domain) {}

  double observe(const Vec& x) override {
    return inner_.observe(domain_.project(from_iso_(x)));
  }
  std::uint64_t queries_used() const override { return inner_.queries_used(); }
  std::optional<std::uint64_t> budget() const override { return inner_.budget(); }

 private:
  QueryHandle& inner_;
  const geo::AffineMap& from_iso_;
  const Domain& domain_;
};

geo::Ellipsoid initial_ellipsoid(const Domain& domain) {
  switch (domain.kind) {
    case DomainKind::UnitBall:
      return geo::Ellipsoid::ball(Vec::Zero(domain.dim), 1.0);
    case DomainKind::Box: {
      // Minimum-volume ellipsoid of a box in closed form: axes d * half_width^2.
      geo::Ellipsoid e;
      e.center = 0.5 * (domain.lo + domain.hi);
      const Vec half = 0.5 * (domain.hi - domain.lo);
      const Vec diag = static_cast<double>(domain.dim) * half.array().square().matrix();
      e.shape = diag.asDiagonal();
      return e;
    }
    case DomainKind::UnitInterval:
      break;
  }
  throw PreconditionError("run_nd: domain must be a ball or a box");
}

std::vector<double> key_of(const Vec& p) {
  return std::vector<double>(p.data(), p.data() + p.size());
}

}  // namespace

ResultND run_nd(QueryHandle& oracle, const Domain& domain, const OptionsND& options) {
  const int d = domain.dim;
  Thresholds thresholds{options.c1, options.c2, d};
  thresholds.validate(options.theory_mode);
  if (options.horizon < 2) throw PreconditionError("run_nd: horizon must be >= 2");
  const SamplingPlan& plan = options.plan;
  if (plan.horizon != options.horizon)
    throw PreconditionError("run_nd: sampling plan horizon mismatch");
  if (static_cast<std::uint64_t>(d + 1) * plan.required_samples(0.5) > options.horizon)
    throw PreconditionError("run_nd: budget below one simplex round at gamma = 1/2");

  const double r_tau = 1.0 / (options.c1 * d);  // isotropic coords, R_tau = 1
  const std::uint32_t chain_cap = static_cast<std::uint32_t>(
      4.0 * std::ceil(2.0 * d * d * std::log(d) / (options.c2 * options.c2)) + 16);

  ResultND result;
  geo::Ellipsoid region = initial_ellipsoid(domain);
  std::string stop;

  for (std::uint32_t epoch = 1; stop.empty(); ++epoch) {
    if (epoch > options.max_epochs) {
      stop = "epoch-cap";
      break;
    }
    {
      Eigen::SelfAdjointEigenSolver<Mat> es(region.shape);
      if (std::sqrt(es.eigenvalues().maxCoeff()) < options.width_floor) {
        stop = "width-floor";
        break;
      }
    }

    geo::IsotropicMap iso;
    try {
      iso = geo::round_to_isotropic(region);
    } catch (const ConditioningError&) {
      stop = "conditioning";
      break;
    }
    MappedHandle handle(oracle, iso.inverse, domain);
    const geo::Ellipsoid ball = geo::Ellipsoid::ball(Vec::Zero(d), 1.0);
    const std::vector<Vec> simplex = geo::regular_simplex(Vec::Zero(d), r_tau, d);

    std::map<std::vector<double>, PointEstimate> cache;
    auto estimate_at = [&](const Vec& p) -> PointEstimate& {
      auto [it, inserted] = cache.try_emplace(key_of(p), PointEstimate(p));
      return it->second;
    };

    EpochRecordND epoch_rec;
    epoch_rec.epoch = epoch;
    epoch_rec.r_tau = r_tau;
    epoch_rec.min_apex_distance = std::numeric_limits<double>::infinity();
    bool epoch_done = false;

    for (std::uint32_t round = 1; !epoch_done && stop.empty(); ++round) {
      if (round > options.max_rounds_per_epoch) {
        stop = "round-cap";
        break;
      }
      const double gamma_i = std::ldexp(1.0, -static_cast<int>(round));

      RoundRecord round_rec;
      round_rec.epoch = epoch;
      round_rec.round = round;
      round_rec.gamma = gamma_i;
      const std::uint64_t round_start = oracle.queries_used();

      auto finish_round = [&]() {
        round_rec.new_queries = oracle.queries_used() - round_start;
        if (round_rec.new_queries > 0) {
          round_rec.first_query = round_start + 1;
          round_rec.last_query = oracle.queries_used();
        }
        epoch_rec.max_pyramids_per_round =
            std::max(epoch_rec.max_pyramids_per_round, round_rec.pyramids);
        result.rounds.push_back(round_rec);
      };

      auto refine_batch = [&](const std::vector<Vec>& points, double gamma) -> bool {
        std::uint64_t need = 0;
        for (const Vec& p : points) need += refine_cost(estimate_at(p), gamma, plan);
        if (need > oracle.remaining()) {
          stop = "budget-gate";
          return false;
        }
        try {
          for (const Vec& p : points) refine(estimate_at(p), handle, gamma, plan);
        } catch (const BudgetExhausted&) {
          stop = "budget-exhausted";
          return false;
        }
        return true;
      };

      if (!refine_batch(simplex, gamma_i)) {
        finish_round();
        break;
      }

      int best = 0;
      for (int j = 1; j <= d; ++j) {
        if (estimate_at(simplex[j]).lb_at(gamma_i) >
            estimate_at(simplex[best]).lb_at(gamma_i))
          best = j;
      }
      Vec apex = simplex[best];

      // Pyramid chain; each Case 1a advance hands the TOP vertex to the next
      // pyramid and resets gamma_hat.
      while (stop.empty() && !epoch_done) {
        if (round_rec.pyramids >= chain_cap) {
          stop = "chain-overflow";
          break;
        }
        geo::Pyramid pyramid;
        try {
          pyramid = geo::build_pyramid(apex, Vec::Zero(d), options.c2);
        } catch (const GeometricFailure&) {
          stop = "degenerate-apex";
          break;
        }
        round_rec.pyramids += 1;
        epoch_rec.min_apex_distance = std::min(epoch_rec.min_apex_distance, apex.norm());
        const Vec center = geo::pyramid_center(pyramid);

        std::vector<Vec> probe_points;
        probe_points.push_back(pyramid.apex);
        probe_points.push_back(center);
        for (const Vec& z : pyramid.base) probe_points.push_back(z);

        double gamma_hat = 0.5;
        bool next_pyramid = false;
        while (stop.empty()) {
          if (!refine_batch(probe_points, gamma_hat)) break;

          std::vector<PointEstimate> vertex_ests;
          vertex_ests.reserve(d);
          for (const Vec& z : pyramid.base) vertex_ests.push_back(estimate_at(z));
          const PyramidClassification cls = classify_pyramid(
              estimate_at(pyramid.apex), estimate_at(center), vertex_ests, gamma_hat,
              thresholds);

          if (cls.decision == CaseND::Case1a) {
            apex = cls.top == 0 ? pyramid.apex : pyramid.base[cls.top - 1];
            next_pyramid = true;
            break;
          }
          if (cls.decision == CaseND::Case2a) {
            gamma_hat /= 2.0;
            if (gamma_hat < gamma_i) {
              round_rec.continued = true;
              break;
            }
            continue;
          }

          // Case 1b or 2b: the epoch ends through cone-cutting.
          const bool raised = cls.decision == CaseND::Case2b;
          const geo::Pyramid final_pyramid = raised ? hat_raising(pyramid) : pyramid;
          const ConeCutResult cut = cone_cutting(final_pyramid, ball);

          epoch_rec.exit = raised ? EpochExitND::Case2b : EpochExitND::Case1b;
          epoch_rec.exit_round = round;
          epoch_rec.gamma_i = gamma_i;
          epoch_rec.gamma_hat = gamma_hat;
          epoch_rec.volume_ratio = cut.volume_ratio;
          epoch_rec.cut_alpha = cut.alpha;
          epoch_rec.cut_fallback = cut.fallback;
          epoch_rec.has_cut = true;
          epoch_rec.probe_pyramid = pyramid;
          epoch_rec.cut_pyramid = final_pyramid;
          epoch_rec.bottom_point =
              cls.bottom == 0 ? pyramid.apex : pyramid.base[cls.bottom - 1];
          epoch_rec.from_iso = iso.inverse;
          region = geo::transform_ellipsoid(cut.next, iso.inverse);
          round_rec.ended_epoch = true;
          epoch_done = true;
          break;
        }
        if (!next_pyramid) break;
      }
      finish_round();
      if (round_rec.continued) continue;
      break;
    }

    if (!epoch_done && stop.empty()) stop = "round-cap";
    if (!epoch_done) {
      epoch_rec.exit = EpochExitND::Stop;
    }
    epoch_rec.region_after = region;
    result.epochs.push_back(epoch_rec);
  }

  result.final_region = region;
  result.recommendation = domain.project(region.center);
  result.stop_reason = stop;
  result.queries_used = oracle.queries_used();
  return result;
}

}  // namespace cbopt
