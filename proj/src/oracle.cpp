#include "cbopt/oracle.hpp"

#include <algorithm>
#include <cmath>

#include "cbopt/errors.hpp"

namespace cbopt {

Domain Domain::unit_interval() {
  Domain d;
  d.kind = DomainKind::UnitInterval;
  d.dim = 1;
  return d;
}

Domain Domain::unit_ball(int dim) {
  if (dim < 1) throw PreconditionError("unit_ball: dim must be >= 1");
  Domain d;
  d.kind = DomainKind::UnitBall;
  d.dim = dim;
  return d;
}

Domain Domain::box(Vec lo, Vec hi) {
  if (lo.size() != hi.size() || lo.size() == 0)
    throw PreconditionError("box: bounds must have equal nonzero length");
  for (int i = 0; i < lo.size(); ++i)
    if (!(lo[i] < hi[i])) throw PreconditionError("box: lo < hi required");
  Domain d;
  d.kind = DomainKind::Box;
  d.dim = static_cast<int>(lo.size());
  d.lo = std::move(lo);
  d.hi = std::move(hi);
  return d;
}

bool Domain::contains(const Vec& x, double tol) const {
  if (x.size() != dim) return false;
  switch (kind) {
    case DomainKind::UnitInterval:
      return x[0] >= -tol && x[0] <= 1.0 + tol;
    case DomainKind::UnitBall:
      return x.norm() <= 1.0 + tol;
    case DomainKind::Box:
      for (int i = 0; i < dim; ++i)
        if (x[i] < lo[i] - tol || x[i] > hi[i] + tol) return false;
      return true;
  }
  return false;
}

Vec Domain::project(const Vec& x) const {
  switch (kind) {
    case DomainKind::UnitInterval: {
      Vec p(1);
      p[0] = std::clamp(x[0], 0.0, 1.0);
      return p;
    }
    case DomainKind::UnitBall: {
      const double n = x.norm();
      return n <= 1.0 ? x : Vec(x / n);
    }
    case DomainKind::Box: {
      Vec p = x;
      for (int i = 0; i < dim; ++i) p[i] = std::clamp(p[i], lo[i], hi[i]);
      return p;
    }
  }
  return x;
}

double Domain::diameter() const {
  switch (kind) {
    case DomainKind::UnitInterval:
      return 1.0;
    case DomainKind::UnitBall:
      return 2.0;
    case DomainKind::Box:
      return (hi - lo).norm();
  }
  return 0.0;
}

namespace {

double max_distance_to(const Domain& dom, const Vec& p) {
  switch (dom.kind) {
    case DomainKind::UnitInterval:
      return std::max(p[0], 1.0 - p[0]);
    case DomainKind::UnitBall:
      return 1.0 + p.norm();
    case DomainKind::Box: {
      double sq = 0.0;
      for (int i = 0; i < dom.dim; ++i) {
        const double far = std::max(p[i] - dom.lo[i], dom.hi[i] - p[i]);
        sq += far * far;
      }
      return std::sqrt(sq);
    }
  }
  return 0.0;
}

}  // namespace

TestFunction TestFunction::linear_1d(double slope) {
  if (slope == 0.0) throw PreconditionError("linear_1d: slope must be nonzero");
  TestFunction f;
  f.kind_ = FunctionKind::Linear1D;
  f.domain_ = Domain::unit_interval();
  f.minimizer_ = vec1(slope > 0.0 ? 0.0 : 1.0);
  f.scale_ = slope;
  f.offset_ = slope * (f.minimizer_[0]);
  f.lipschitz_ = std::abs(slope);
  return f;
}

TestFunction TestFunction::absolute_value_1d(double minimizer, double slope) {
  if (minimizer < 0.0 || minimizer > 1.0)
    throw PreconditionError("absolute_value_1d: minimizer outside [0,1]");
  if (slope <= 0.0) throw PreconditionError("absolute_value_1d: slope must be > 0");
  TestFunction f;
  f.kind_ = FunctionKind::AbsoluteValue1D;
  f.domain_ = Domain::unit_interval();
  f.minimizer_ = vec1(minimizer);
  f.scale_ = slope;
  f.lipschitz_ = slope;
  return f;
}

TestFunction TestFunction::quadratic_1d(double minimizer, double curvature) {
  if (minimizer < 0.0 || minimizer > 1.0)
    throw PreconditionError("quadratic_1d: minimizer outside [0,1]");
  if (curvature <= 0.0) throw PreconditionError("quadratic_1d: curvature must be > 0");
  TestFunction f;
  f.kind_ = FunctionKind::Quadratic1D;
  f.domain_ = Domain::unit_interval();
  f.minimizer_ = vec1(minimizer);
  f.scale_ = curvature;
  f.lipschitz_ = 2.0 * curvature * std::max(minimizer, 1.0 - minimizer);
  return f;
}

TestFunction TestFunction::quadratic_nd(Vec minimizer, Domain domain, double curvature) {
  if (!domain.contains(minimizer))
    throw PreconditionError("quadratic_nd: minimizer outside domain");
  if (curvature <= 0.0) throw PreconditionError("quadratic_nd: curvature must be > 0");
  TestFunction f;
  f.kind_ = FunctionKind::QuadraticND;
  f.domain_ = std::move(domain);
  f.minimizer_ = std::move(minimizer);
  f.scale_ = curvature;
  f.lipschitz_ = curvature * max_distance_to(f.domain_, f.minimizer_);
  return f;
}

TestFunction TestFunction::skewed_quadratic_nd(Vec minimizer, Domain domain, Mat quadratic_form) {
  if (!domain.contains(minimizer))
    throw PreconditionError("skewed_quadratic_nd: minimizer outside domain");
  if (quadratic_form.rows() != domain.dim || quadratic_form.cols() != domain.dim)
    throw PreconditionError("skewed_quadratic_nd: form has wrong shape");
  Mat sym = 0.5 * (quadratic_form + quadratic_form.transpose());
  Eigen::SelfAdjointEigenSolver<Mat> es(sym);
  if (es.eigenvalues().minCoeff() <= 0.0)
    throw PreconditionError("skewed_quadratic_nd: form must be positive definite");
  TestFunction f;
  f.kind_ = FunctionKind::SkewedQuadraticND;
  f.domain_ = std::move(domain);
  f.minimizer_ = std::move(minimizer);
  f.form_ = std::move(sym);
  f.lipschitz_ = es.eigenvalues().maxCoeff() * max_distance_to(f.domain_, f.minimizer_);
  return f;
}

TestFunction TestFunction::piecewise_linear_nd(Vec minimizer, Domain domain,
                                               std::vector<Vec> slopes,
                                               std::vector<double> offsets) {
  if (slopes.empty() || slopes.size() != offsets.size())
    throw PreconditionError("piecewise_linear_nd: need matching slopes/offsets");
  if (!domain.contains(minimizer))
    throw PreconditionError("piecewise_linear_nd: minimizer outside domain");
  TestFunction f;
  f.kind_ = FunctionKind::PiecewiseLinearND;
  f.domain_ = std::move(domain);
  f.minimizer_ = std::move(minimizer);
  f.slopes_ = std::move(slopes);
  f.offsets_ = std::move(offsets);
  double at_min = -std::numeric_limits<double>::infinity();
  double lip = 0.0;
  for (std::size_t i = 0; i < f.slopes_.size(); ++i) {
    if (f.slopes_[i].size() != f.domain_.dim)
      throw PreconditionError("piecewise_linear_nd: slope has wrong dimension");
    at_min = std::max(at_min, f.slopes_[i].dot(f.minimizer_) + f.offsets_[i]);
    lip = std::max(lip, f.slopes_[i].norm());
  }
  f.offset_ = at_min;
  f.lipschitz_ = lip;
  return f;
}

double TestFunction::value(const Vec& x) const {
  switch (kind_) {
    case FunctionKind::Linear1D:
      return scale_ * x[0] - offset_;
    case FunctionKind::AbsoluteValue1D:
      return scale_ * std::abs(x[0] - minimizer_[0]);
    case FunctionKind::Quadratic1D: {
      const double dxm = x[0] - minimizer_[0];
      return scale_ * dxm * dxm;
    }
    case FunctionKind::QuadraticND:
      return 0.5 * scale_ * (x - minimizer_).squaredNorm();
    case FunctionKind::SkewedQuadraticND: {
      const Vec dxy = x - minimizer_;
      return 0.5 * dxy.dot(form_ * dxy);
    }
    case FunctionKind::PiecewiseLinearND: {
      double best = -std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < slopes_.size(); ++i)
        best = std::max(best, slopes_[i].dot(x) + offsets_[i]);
      return best - offset_;
    }
  }
  return 0.0;
}

double true_value(const TestFunction& fn, const Vec& x) {
  if (!fn.domain().contains(x))
    throw DomainViolation("true_value: query point outside domain");
  return fn.value(x);
}

double NoiseModel::draw(Rng& rng) const {
  if (sigma == 0.0) return 0.0;
  switch (family) {
    case NoiseFamily::Gaussian:
      return sigma * rng.normal();
    case NoiseFamily::BoundedUniform: {
      const double half_width = sigma * std::sqrt(3.0);
      return rng.uniform(-half_width, half_width);
    }
  }
  return 0.0;
}

Vec RegretLedger::mean_query() const {
  if (total_queries == 0) return query_sum;
  return query_sum / static_cast<double>(total_queries);
}

double RegretLedger::regret_between(std::uint64_t first_t, std::uint64_t last_t) const {
  if (!regret_series) throw PreconditionError("regret_between: series not recorded");
  if (first_t == 0 || last_t < first_t) return 0.0;
  const auto& s = *regret_series;
  const double before = first_t >= 2 ? s.at(first_t - 2) : 0.0;
  return s.at(last_t - 1) - before;
}

NoisyOracle::NoisyOracle(TestFunction fn, NoiseModel noise, std::optional<std::uint64_t> budget)
    : fn_(std::move(fn)), noise_(noise), rng_(noise.seed), budget_(budget) {
  ledger_.query_sum = Vec::Zero(fn_.dim());
}

double NoisyOracle::observe(const Vec& x) {
  if (!fn_.domain().contains(x))
    throw DomainViolation("observe: query point outside domain");
  if (budget_ && ledger_.total_queries >= *budget_)
    throw BudgetExhausted("observe: query budget spent");

  const double fx = fn_.value(x);
  const double y = fx + noise_.draw(rng_);

  ledger_.total_queries += 1;
  ledger_.cumulative_regret += fx;  // f(x*) = 0 by construction
  ledger_.query_sum += x;
  if (ledger_.per_query_log) {
    ledger_.per_query_log->push_back(
        {ledger_.total_queries, x, fx, y, ledger_.cumulative_regret});
  }
  if (ledger_.regret_series) ledger_.regret_series->push_back(ledger_.cumulative_regret);
  return y;
}

std::uint64_t QueryHandle::remaining() const {
  const auto cap = budget();
  if (!cap) return std::numeric_limits<std::uint64_t>::max();
  const auto used = queries_used();
  return used >= *cap ? 0 : *cap - used;
}

}  // namespace cbopt
