#include "cbopt/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <ostream>

#include <json.hpp>

#include "cbopt/errors.hpp"
#include "cbopt/trace.hpp"

namespace cbopt {

void ExperimentConfig::validate() const {
  if (horizon < 2) throw PreconditionError("config: T must be >= 2");
  if (sigma < 0.0) throw PreconditionError("config: sigma must be >= 0");
  if (d < 1) throw PreconditionError("config: d must be >= 1");
  if ((algorithm == AlgorithmKind::OneD) != (d == 1))
    throw PreconditionError("config: d = 1 exactly when algorithm is 1d");
  const bool one_d_function = function.size() > 3 && function.rfind("-1d") == function.size() - 3;
  if ((algorithm == AlgorithmKind::OneD) != one_d_function)
    throw PreconditionError("config: function '" + function + "' does not fit the algorithm");
  if (seeds.empty()) throw PreconditionError("config: need at least one seed");
  if (algorithm == AlgorithmKind::ND) {
    Thresholds th{c1, c2, d};
    th.validate(mode == RunMode::Theory);
  }
  if (doubling && doubling_initial < 2)
    throw PreconditionError("config: doubling initial horizon must be >= 2");
}

TestFunction make_function(const ExperimentConfig& config) {
  const auto& name = config.function;
  if (name == "linear-1d") return TestFunction::linear_1d(config.scale);
  if (name == "absolute-value-1d")
    return TestFunction::absolute_value_1d(config.minimizer.at(0), config.scale);
  if (name == "quadratic-1d")
    return TestFunction::quadratic_1d(config.minimizer.at(0), config.scale);

  Vec minimizer(config.d);
  for (int i = 0; i < config.d; ++i)
    minimizer[i] = i < static_cast<int>(config.minimizer.size()) ? config.minimizer[i] : 0.0;
  Domain domain = Domain::unit_ball(config.d);

  if (name == "quadratic-nd")
    return TestFunction::quadratic_nd(minimizer, domain, config.scale);
  if (name == "skewed-quadratic-nd") {
    // Fixed rotation and log-spaced spectrum; deterministic across runs.
    Rng rng(0x5eedULL);
    Mat gauss(config.d, config.d);
    for (int i = 0; i < config.d; ++i)
      for (int j = 0; j < config.d; ++j) gauss(i, j) = rng.normal();
    const Mat q = Eigen::HouseholderQR<Mat>(gauss).householderQ();
    Vec eigs(config.d);
    for (int i = 0; i < config.d; ++i)
      eigs[i] = config.scale * std::pow(5.0, -static_cast<double>(i) / std::max(1, config.d - 1));
    return TestFunction::skewed_quadratic_nd(minimizer, domain,
                                             q * eigs.asDiagonal() * q.transpose());
  }
  if (name == "piecewise-linear-nd") {
    // Unit slopes through the regular simplex directions; minimum at x*.
    const auto dirs = geo::regular_simplex(Vec::Zero(config.d), 1.0, config.d);
    std::vector<Vec> slopes;
    std::vector<double> offsets;
    for (const Vec& a : dirs) {
      slopes.push_back(config.scale * a);
      offsets.push_back(-config.scale * a.dot(minimizer));
    }
    return TestFunction::piecewise_linear_nd(minimizer, domain, slopes, offsets);
  }
  throw PreconditionError("config: unknown test function '" + name + "'");
}

SamplingPlan make_plan(const ExperimentConfig& config, std::uint64_t horizon) {
  SamplingPlan plan;
  plan.sigma = config.sigma;
  plan.horizon = horizon;
  if (config.mode == RunMode::PaperLiteral) {
    plan.mode = SamplingMode::PaperLiteral;
    plan.reuse_samples = false;
  } else {
    plan.mode = SamplingMode::Calibrated;
    plan.hoeffding_const = 2.0;
    plan.reuse_samples = true;
  }
  return plan;
}

double theoretical_bound_1d(std::uint64_t horizon, double sigma) {
  if (!(sigma > 0.0)) throw PreconditionError("theoretical_bound_1d: sigma must be > 0");
  const double t = static_cast<double>(horizon);
  const double log_t = std::log(t);
  const double inner = t / (8.0 * sigma * log_t);
  if (!(inner > 1.0)) throw PreconditionError("theoretical_bound_1d: T/(8 sigma ln T) must exceed 1");
  return 108.0 * std::sqrt(sigma * t * log_t) * std::log(inner) / std::log(4.0 / 3.0);
}

double epoch_bound_1d(std::uint64_t horizon, double sigma) {
  if (!(sigma > 0.0)) throw PreconditionError("epoch_bound_1d: sigma must be > 0");
  const double t = static_cast<double>(horizon);
  const double log_t = std::log(t);
  const double inner = t / (8.0 * sigma * log_t);
  if (!(inner > 1.0)) throw PreconditionError("epoch_bound_1d: T/(8 sigma ln T) must exceed 1");
  return 0.5 * std::log(inner) / std::log(4.0 / 3.0);
}

std::uint64_t mc_containment(const mc::Sampler& sample, const mc::Predicate& inside,
                             std::uint64_t n) {
  if (n == 0) throw PreconditionError("mc_containment: need n >= 1");
  return mc::containment_violations(sample, inside, n);
}

namespace {

SeedOutcome run_one_seed(const ExperimentConfig& config, const TestFunction& fn,
                         std::uint64_t seed) {
  NoisyOracle oracle(fn, NoiseModel{config.sigma, config.noise_family, seed}, config.horizon);
  if (config.granularity != LogGranularity::PerEpoch) oracle.ledger().enable_series();
  if (config.granularity == LogGranularity::PerQuery) oracle.ledger().enable_log();

  SeedOutcome outcome;
  outcome.seed = seed;
  const auto start = std::chrono::steady_clock::now();

  if (config.algorithm == AlgorithmKind::OneD) {
    Options1D options;
    options.horizon = config.horizon;
    options.plan = make_plan(config, config.horizon);
    Result1D res = run_1d(oracle, options);
    outcome.epochs = static_cast<std::uint32_t>(res.epochs.size());
    outcome.recommendation = vec1(res.recommendation);
    outcome.stop_reason = res.stop_reason;
    outcome.result_1d = std::move(res);
  } else {
    OptionsND options;
    options.horizon = config.horizon;
    options.plan = make_plan(config, config.horizon);
    options.c1 = config.c1;
    options.c2 = config.c2;
    options.theory_mode = config.mode == RunMode::Theory;
    ResultND res = run_nd(oracle, fn.domain(), options);
    outcome.epochs = static_cast<std::uint32_t>(res.epochs.size());
    outcome.recommendation = res.recommendation;
    outcome.stop_reason = res.stop_reason;
    outcome.result_nd = std::move(res);
  }

  outcome.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const RegretLedger& ledger = oracle.ledger();
  outcome.regret = ledger.cumulative_regret;
  outcome.queries = ledger.total_queries;
  outcome.recommendation_suboptimality = true_value(fn, outcome.recommendation);
  if (ledger.total_queries > 0)
    outcome.jensen_gap = true_value(fn, fn.domain().project(ledger.mean_query()));
  if (ledger.per_query_log) outcome.query_log = *ledger.per_query_log;
  if (ledger.regret_series) outcome.regret_series = *ledger.regret_series;
  return outcome;
}

void write_outputs(const ExperimentConfig& config, const ExperimentSummary& summary) {
  if (config.out_dir.empty()) return;
  std::filesystem::create_directories(config.out_dir);
  if (config.granularity == LogGranularity::PerQuery) {
    for (const auto& outcome : summary.outcomes) {
      const std::string path =
          config.out_dir + "/run_seed" + std::to_string(outcome.seed) + ".csv";
      write_query_csv(path, outcome.query_log, config.d);
    }
  }
  write_summary_json(config.out_dir + "/summary.json", config, summary);
}

}  // namespace

ExperimentSummary run_experiment(const ExperimentConfig& config) {
  config.validate();
  if (config.doubling) return doubling_wrapper(config);
  const TestFunction fn = make_function(config);

  ExperimentSummary summary;
  summary.outcomes.resize(config.seeds.size());
  const int n_seeds = static_cast<int>(config.seeds.size());
  std::exception_ptr failure;
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) if (n_seeds > 1)
#endif
  for (int i = 0; i < n_seeds; ++i) {
    try {
      summary.outcomes[i] = run_one_seed(config, fn, config.seeds[i]);
    } catch (...) {
      // Exceptions must not unwind out of the worker pool; surface the first
      // one after the join.
#ifdef _OPENMP
#pragma omp critical
#endif
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);

  if (config.algorithm == AlgorithmKind::OneD && config.sigma > 0.0) {
    try {
      summary.regret_bound_1d = theoretical_bound_1d(config.horizon, config.sigma);
    } catch (const PreconditionError&) {
    }
  }
  write_outputs(config, summary);
  return summary;
}

namespace {

// Caps a stage of the doubling loop on top of the shared global budget.
class CappedHandle final : public QueryHandle {
 public:
  CappedHandle(QueryHandle& inner, std::uint64_t stage_cap)
      : inner_(inner), cap_end_(inner.queries_used() + stage_cap) {}

  double observe(const Vec& x) override {
    if (inner_.queries_used() >= cap_end_)
      throw BudgetExhausted("doubling stage budget spent");
    return inner_.observe(x);
  }
  std::uint64_t queries_used() const override { return inner_.queries_used(); }
  std::optional<std::uint64_t> budget() const override {
    const auto global = inner_.budget();
    return global ? std::min(*global, cap_end_) : cap_end_;
  }

 private:
  QueryHandle& inner_;
  std::uint64_t cap_end_;
};

SeedOutcome run_one_seed_doubling(const ExperimentConfig& config, const TestFunction& fn,
                                  std::uint64_t seed) {
  NoisyOracle oracle(fn, NoiseModel{config.sigma, config.noise_family, seed}, config.horizon);
  if (config.granularity != LogGranularity::PerEpoch) oracle.ledger().enable_series();
  if (config.granularity == LogGranularity::PerQuery) oracle.ledger().enable_log();

  SeedOutcome outcome;
  outcome.seed = seed;
  const auto start = std::chrono::steady_clock::now();
  std::uint64_t stage_horizon = config.doubling_initial;
  std::uint32_t epochs = 0;

  while (true) {
    const std::uint64_t used_before = oracle.queries_used();
    CappedHandle capped(oracle, std::min(stage_horizon, oracle.remaining()));
    if (config.algorithm == AlgorithmKind::OneD) {
      Options1D options;
      options.horizon = stage_horizon;
      options.plan = make_plan(config, stage_horizon);
      Result1D res = run_1d(capped, options);
      epochs += static_cast<std::uint32_t>(res.epochs.size());
      outcome.recommendation = vec1(res.recommendation);
      outcome.stop_reason = res.stop_reason;
    } else {
      OptionsND options;
      options.horizon = stage_horizon;
      options.plan = make_plan(config, stage_horizon);
      options.c1 = config.c1;
      options.c2 = config.c2;
      options.theory_mode = config.mode == RunMode::Theory;
      ResultND res = run_nd(capped, fn.domain(), options);
      epochs += static_cast<std::uint32_t>(res.epochs.size());
      outcome.recommendation = res.recommendation;
      outcome.stop_reason = res.stop_reason;
    }
    if (oracle.remaining() == 0) break;
    if (stage_horizon >= config.horizon) break;       // guess covers the target horizon
    if (oracle.queries_used() == used_before) break;  // nothing fits any more
    stage_horizon *= 2;
  }

  outcome.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const RegretLedger& ledger = oracle.ledger();
  outcome.regret = ledger.cumulative_regret;
  outcome.queries = ledger.total_queries;
  outcome.epochs = epochs;
  outcome.recommendation_suboptimality = true_value(fn, outcome.recommendation);
  if (ledger.total_queries > 0)
    outcome.jensen_gap = true_value(fn, fn.domain().project(ledger.mean_query()));
  if (ledger.per_query_log) outcome.query_log = *ledger.per_query_log;
  if (ledger.regret_series) outcome.regret_series = *ledger.regret_series;
  return outcome;
}

}  // namespace

ExperimentSummary doubling_wrapper(const ExperimentConfig& config) {
  config.validate();
  const TestFunction fn = make_function(config);

  ExperimentSummary summary;
  summary.outcomes.resize(config.seeds.size());
  const int n_seeds = static_cast<int>(config.seeds.size());
  std::exception_ptr failure;
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) if (n_seeds > 1)
#endif
  for (int i = 0; i < n_seeds; ++i) {
    try {
      summary.outcomes[i] = run_one_seed_doubling(config, fn, config.seeds[i]);
    } catch (...) {
#ifdef _OPENMP
#pragma omp critical
#endif
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);

  if (config.algorithm == AlgorithmKind::OneD && config.sigma > 0.0) {
    try {
      summary.regret_bound_1d = theoretical_bound_1d(config.horizon, config.sigma);
    } catch (const PreconditionError&) {
    }
  }
  write_outputs(config, summary);
  return summary;
}

void write_summary_json(const std::string& path, const ExperimentConfig& config,
                        const ExperimentSummary& summary) {
  nlohmann::json doc;
  doc["config"] = {
      {"algorithm", config.algorithm == AlgorithmKind::OneD ? "1d" : "nd"},
      {"function", config.function},
      {"d", config.d},
      {"T", config.horizon},
      {"sigma", config.sigma},
      {"noise", config.noise_family == NoiseFamily::Gaussian ? "gaussian" : "bounded-uniform"},
      {"c1", config.c1},
      {"c2", config.c2},
      {"mode", config.mode == RunMode::Theory       ? "theory"
               : config.mode == RunMode::Practical  ? "practical"
                                                    : "paper-literal"},
      {"doubling", config.doubling},
      {"seeds", config.seeds},
  };
  if (summary.regret_bound_1d) doc["regret_bound_1d"] = *summary.regret_bound_1d;
  auto& results = doc["results"] = nlohmann::json::array();
  for (const auto& outcome : summary.outcomes) {
    nlohmann::json row;
    row["seed"] = outcome.seed;
    row["regret"] = outcome.regret;
    row["queries"] = outcome.queries;
    row["epochs"] = outcome.epochs;
    row["recommendation"] =
        std::vector<double>(outcome.recommendation.data(),
                            outcome.recommendation.data() + outcome.recommendation.size());
    row["suboptimality"] = outcome.recommendation_suboptimality;
    row["jensen_gap"] = outcome.jensen_gap;
    row["wall_time_s"] = outcome.wall_time_s;
    row["stop_reason"] = outcome.stop_reason;
    if (summary.regret_bound_1d) row["within_bound"] = outcome.regret <= *summary.regret_bound_1d;
    results.push_back(std::move(row));
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_summary_json: cannot open " + path);
  out << doc.dump(2) << '\n';
}

geo::Pyramid random_algorithm_pyramid(int dim, double c1, double c2, Rng& rng,
                                      bool allow_hat_raised) {
  const double r_tau = 1.0 / (c1 * dim);
  Vec dir(dim);
  for (int i = 0; i < dim; ++i) dir[i] = rng.normal();
  dir.normalize();
  const double dist = rng.uniform(r_tau / dim, r_tau);
  geo::Pyramid p = geo::build_pyramid(Vec(dist * dir), Vec::Zero(dim), c2);
  if (allow_hat_raised && rng.uniform01() < 0.5) p = hat_raising(p);
  return p;
}

bool verify_geometry(int dim, std::uint64_t trials, std::ostream& out) {
  bool ok = true;
  auto report = [&](const char* name, bool pass, const std::string& detail) {
    out << (pass ? "[PASS] " : "[FAIL] ") << name << ": " << detail << "\n";
    ok = ok && pass;
  };

  // Regular simplex: circumradius, centroid and inradius = r/d.
  {
    const double r = 0.73;
    Vec center = Vec::Constant(dim, 0.2);
    const auto vertices = geo::regular_simplex(center, r, dim);
    double worst = 0.0;
    Vec centroid = Vec::Zero(dim);
    for (const auto& v : vertices) {
      worst = std::max(worst, std::abs((v - center).norm() - r));
      centroid += v;
    }
    centroid /= static_cast<double>(vertices.size());
    worst = std::max(worst, (centroid - center).norm());
    report("simplex-construction", worst < 1e-10,
           "max circumradius/centroid residual " + format_g17(worst));
  }

  // Pyramid chain distance identities.
  {
    const double c1 = 64.0, c2 = 1.0 / 32.0;
    const double r_tau = 1.0 / (c1 * dim);
    const double cos_phi = c2 / dim;
    const double sin_phi = std::sqrt(1.0 - cos_phi * cos_phi);
    Vec apex = Vec::Zero(dim);
    apex[0] = r_tau;
    double worst = 0.0;
    for (int k = 1; k <= 10; ++k) {
      const geo::Pyramid p = geo::build_pyramid(apex, Vec::Zero(dim), c2);
      const double expect = r_tau * std::pow(sin_phi, k - 1);
      worst = std::max(worst, std::abs(apex.norm() - expect) / expect);
      worst = std::max(worst,
                       std::abs((p.apex - p.base[0]).norm() - expect * cos_phi) / expect);
      worst = std::max(worst, std::abs(p.height() - expect * cos_phi * cos_phi) / expect);
      apex = p.base[0];
    }
    report("pyramid-chain", worst < 1e-9, "max relative residual " + format_g17(worst));
  }

  // Cap-in-cone containment plus the cut-depth guarantee. The hyperplane
  // distance stays below R/(4(d+1)) for d <= 4 at these constants; in higher
  // dimension the facet angle scales the depth by d-1 and the check moves to
  // what the epoch loop actually needs, the per-cut volume ratio.
  {
    Rng rng(17);
    const double c1 = 64.0, c2 = 1.0 / 32.0;
    const geo::Ellipsoid ball = geo::Ellipsoid::ball(Vec::Zero(dim), 1.0);
    const double depth_limit = 1.0 / (4.0 * (dim + 1));
    const double rho = std::exp(-1.0 / (4.0 * (dim + 1)));
    std::uint64_t violations = 0;
    double worst_alpha = 0.0, worst_ratio = 0.0;
    for (int rep = 0; rep < 20; ++rep) {
      const geo::Pyramid p = random_algorithm_pyramid(dim, c1, c2, rng, true);
      const geo::Cone cone = geo::cone_of(p);
      const geo::CapCut cut = geo::cap_halfspace_for_cone(cone, ball);
      worst_alpha = std::max(worst_alpha, cut.alpha);
      const geo::Ellipsoid next = geo::shallow_cut_update(ball, cut.halfspace, -cut.alpha);
      worst_ratio = std::max(worst_ratio, std::sqrt(next.shape.determinant()));
      violations += mc_containment(
          mc::cap_sampler(ball, cut.halfspace, 1000 + rep),
          [&](const Vec& x) { return cone.contains(x, 1e-12); }, trials);
    }
    const bool depth_ok = dim <= 4 ? worst_alpha <= depth_limit : worst_ratio <= rho;
    report("cap-in-cone", violations == 0 && depth_ok,
           "violations " + std::to_string(violations) + ", max alpha " + format_g17(worst_alpha) +
               (dim <= 4 ? " vs " + format_g17(depth_limit)
                         : ", max volume ratio " + format_g17(worst_ratio) + " vs " +
                               format_g17(rho)));
  }

  // Shallow cut: volume ratio and containment of the kept region.
  {
    const geo::Ellipsoid ball = geo::Ellipsoid::ball(Vec::Zero(dim), 1.0);
    const double alpha = -1.0 / (4.0 * (dim + 1));
    Vec normal = Vec::Unit(dim, 0);
    const geo::Halfspace cap{normal, -alpha};
    const geo::Ellipsoid next = geo::shallow_cut_update(ball, cap, alpha);
    const double ratio = std::sqrt(next.shape.determinant() / ball.shape.determinant());
    const double rho = std::exp(-1.0 / (4.0 * (dim + 1)));
    const std::uint64_t violations = mc_containment(
        mc::ellipsoid_minus_cap_sampler(ball, cap, 99),
        [&](const Vec& x) { return next.contains(x, 1e-10); }, trials);
    report("shallow-cut", ratio <= rho && violations == 0,
           "ratio " + format_g17(ratio) + " vs " + format_g17(rho) + ", violations " +
               std::to_string(violations));
  }

  return ok;
}

}  // namespace cbopt
