#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "cbopt/bandit1d.hpp"
#include "cbopt/banditnd.hpp"
#include "cbopt/mc.hpp"
#include "cbopt/oracle.hpp"

namespace cbopt {

enum class AlgorithmKind { OneD, ND };
enum class RunMode { Theory, Practical, PaperLiteral };
enum class LogGranularity { PerQuery, PerRound, PerEpoch };

struct ExperimentConfig {
  AlgorithmKind algorithm = AlgorithmKind::OneD;
  // Objective: linear-1d | absolute-value-1d | quadratic-1d | quadratic-nd |
  // skewed-quadratic-nd | piecewise-linear-nd.
  std::string function = "quadratic-1d";
  std::vector<double> minimizer = {0.3};
  double scale = 1.0;
  int d = 1;
  std::uint64_t horizon = 100000;
  double sigma = 0.1;
  NoiseFamily noise_family = NoiseFamily::Gaussian;
  double c1 = 2.0;
  double c2 = 0.5;
  RunMode mode = RunMode::Practical;
  std::vector<std::uint64_t> seeds = {1};
  std::string out_dir;  // empty: nothing written
  LogGranularity granularity = LogGranularity::PerRound;
  bool doubling = false;
  std::uint64_t doubling_initial = 1024;

  void validate() const;
};

TestFunction make_function(const ExperimentConfig& config);
SamplingPlan make_plan(const ExperimentConfig& config, std::uint64_t horizon);

struct SeedOutcome {
  std::uint64_t seed = 0;
  double regret = 0.0;
  std::uint64_t queries = 0;
  std::uint32_t epochs = 0;
  Vec recommendation;
  double recommendation_suboptimality = 0.0;
  double jensen_gap = 0.0;  // f(mean of queried points) - f(x*)
  double wall_time_s = 0.0;
  std::string stop_reason;
  std::optional<Result1D> result_1d;
  std::optional<ResultND> result_nd;
  std::vector<QueryRecord> query_log;  // populated at per-query granularity
  std::vector<double> regret_series;
};

struct ExperimentSummary {
  std::vector<SeedOutcome> outcomes;
  std::optional<double> regret_bound_1d;
};

// Runs every seed (fanned out over an OpenMP worker pool, merged in seed
// order), optionally writing one CSV per seed plus one JSON summary.
ExperimentSummary run_experiment(const ExperimentConfig& config);

// Restarts the run with doubled horizon guesses until `config.horizon` total
// queries, against one shared ledger.
ExperimentSummary doubling_wrapper(const ExperimentConfig& config);

// 108 sqrt(sigma T ln T) log_{4/3}(T / (8 sigma ln T)); natural logs.
double theoretical_bound_1d(std::uint64_t horizon, double sigma);

// Epoch count ceiling, (1/2) log_{4/3}(T / (8 sigma ln T)).
double epoch_bound_1d(std::uint64_t horizon, double sigma);

// Brute-force containment oracle used by the geometry acceptance checks.
std::uint64_t mc_containment(const mc::Sampler& sample, const mc::Predicate& inside,
                             std::uint64_t n);

// Monte-Carlo geometry checks behind the `verify-geometry` CLI subcommand.
bool verify_geometry(int dim, std::uint64_t trials, std::ostream& out);

// Pyramid positioned the way the epoch loop would place one: apex at distance
// in [r_tau/d, r_tau] from the ball center, optionally hat-raised.
geo::Pyramid random_algorithm_pyramid(int dim, double c1, double c2, Rng& rng,
                                      bool allow_hat_raised);

void write_summary_json(const std::string& path, const ExperimentConfig& config,
                        const ExperimentSummary& summary);

}  // namespace cbopt
