#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cbopt/linalg.hpp"
#include "cbopt/rng.hpp"

namespace cbopt {

enum class DomainKind { UnitInterval, UnitBall, Box };

// Feasible set the objective is defined on. Convex by construction.
struct Domain {
  DomainKind kind = DomainKind::UnitInterval;
  int dim = 1;
  Vec lo;  // box bounds, used when kind == Box
  Vec hi;

  static Domain unit_interval();
  static Domain unit_ball(int dim);
  static Domain box(Vec lo, Vec hi);

  bool contains(const Vec& x, double tol = 1e-9) const;
  // Euclidean projection onto the set.
  Vec project(const Vec& x) const;
  double diameter() const;
};

enum class FunctionKind {
  Linear1D,
  AbsoluteValue1D,
  Quadratic1D,
  QuadraticND,
  SkewedQuadraticND,
  PiecewiseLinearND,
};

// Convex test objective with a known minimizer, normalized so f(x*) = 0.
class TestFunction {
 public:
  static TestFunction linear_1d(double slope);
  static TestFunction absolute_value_1d(double minimizer, double slope = 1.0);
  static TestFunction quadratic_1d(double minimizer, double curvature = 1.0);
  static TestFunction quadratic_nd(Vec minimizer, Domain domain, double curvature = 1.0);
  static TestFunction skewed_quadratic_nd(Vec minimizer, Domain domain, Mat quadratic_form);
  // f(x) = max_i <a_i, x> + b_i, shifted so the value at `minimizer` is 0.
  static TestFunction piecewise_linear_nd(Vec minimizer, Domain domain,
                                          std::vector<Vec> slopes, std::vector<double> offsets);

  FunctionKind kind() const { return kind_; }
  const Domain& domain() const { return domain_; }
  const Vec& minimizer() const { return minimizer_; }
  int dim() const { return domain_.dim; }
  // Largest gradient norm over the domain; 1 for the canonical test functions.
  double lipschitz_bound() const { return lipschitz_; }

  // Exact f(x). No domain check, no ledger: callers that need the checked
  // version go through true_value().
  double value(const Vec& x) const;

 private:
  TestFunction() = default;

  FunctionKind kind_ = FunctionKind::AbsoluteValue1D;
  Domain domain_;
  Vec minimizer_;
  double scale_ = 1.0;           // slope or curvature
  Mat form_;                     // SkewedQuadraticND
  std::vector<Vec> slopes_;      // PiecewiseLinearND
  std::vector<double> offsets_;  // PiecewiseLinearND
  double offset_ = 0.0;          // subtracted so f(x*) = 0
  double lipschitz_ = 1.0;
};

// Ground-truth access for the ledger and tests; never handed to algorithms.
double true_value(const TestFunction& fn, const Vec& x);

enum class NoiseFamily { Gaussian, BoundedUniform };

// Zero-mean sigma-subgaussian observation noise.
struct NoiseModel {
  double sigma = 0.0;
  NoiseFamily family = NoiseFamily::Gaussian;
  std::uint64_t seed = 0;

  double draw(Rng& rng) const;
  double variance() const { return sigma * sigma; }
};

struct QueryRecord {
  std::uint64_t t = 0;
  Vec x;
  double fx = 0.0;
  double y = 0.0;
  double cumulative_regret = 0.0;
};

// Per-run accounting of every oracle call and the true excess cost paid.
struct RegretLedger {
  std::uint64_t total_queries = 0;
  double cumulative_regret = 0.0;
  Vec query_sum;  // running sum of queried points, for Jensen checks
  std::optional<std::vector<QueryRecord>> per_query_log;
  // Cumulative regret after query t (1-indexed); compact enough to keep at
  // large horizons where the full log is off.
  std::optional<std::vector<double>> regret_series;

  void enable_log() { per_query_log.emplace(); }
  void enable_series() { regret_series.emplace(); }
  Vec mean_query() const;
  // Regret accrued by queries first_t..last_t inclusive; needs the series.
  double regret_between(std::uint64_t first_t, std::uint64_t last_t) const;
};

// Query-only view handed to the optimization algorithms. Ground truth stays
// on the other side of this interface.
class QueryHandle {
 public:
  virtual ~QueryHandle() = default;
  virtual double observe(const Vec& x) = 0;
  virtual std::uint64_t queries_used() const = 0;
  virtual std::optional<std::uint64_t> budget() const = 0;

  std::uint64_t remaining() const;
};

class NoisyOracle final : public QueryHandle {
 public:
  NoisyOracle(TestFunction fn, NoiseModel noise,
              std::optional<std::uint64_t> budget = std::nullopt);

  // f(x) + eps; charges one query and the true regret increment.
  double observe(const Vec& x) override;

  std::uint64_t queries_used() const override { return ledger_.total_queries; }
  std::optional<std::uint64_t> budget() const override { return budget_; }

  const RegretLedger& ledger() const { return ledger_; }
  RegretLedger& ledger() { return ledger_; }
  const TestFunction& function() const { return fn_; }
  const NoiseModel& noise() const { return noise_; }

 private:
  TestFunction fn_;
  NoiseModel noise_;
  Rng rng_;
  RegretLedger ledger_;
  std::optional<std::uint64_t> budget_;
};

}  // namespace cbopt
