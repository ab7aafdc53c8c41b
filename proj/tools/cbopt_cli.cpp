#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cbopt/errors.hpp"
#include "cbopt/harness.hpp"
#include "cbopt/trace.hpp"

namespace {

struct RunArgs {
  cbopt::ExperimentConfig config;
  std::string config_path;
  std::string algorithm = "1d";
  std::string mode = "practical";
  std::string noise = "gaussian";
  std::string granularity = "auto";
};

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

// Plain `key = value` document; '#' starts a comment. Flags given on the
// command line take precedence over file values.
std::map<std::string, std::string> read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw cbopt::PreconditionError("cannot open config file: " + path);
  std::map<std::string, std::string> values;
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (!key.empty()) values[key] = value;
  }
  return values;
}

std::vector<double> parse_double_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(std::stod(trim(item)));
  return out;
}

std::vector<std::uint64_t> parse_seed_list(const std::string& text) {
  std::vector<std::uint64_t> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(std::stoull(trim(item)));
  return out;
}

void apply_config_file(RunArgs& args, const CLI::App& cmd) {
  if (args.config_path.empty()) return;
  const auto values = read_config_file(args.config_path);
  auto from_file = [&](const char* flag, const char* key, auto apply) {
    if (cmd.count(flag) > 0) return;  // explicit flag wins
    const auto it = values.find(key);
    if (it != values.end()) apply(it->second);
  };
  auto& config = args.config;
  from_file("--algorithm", "algorithm", [&](const std::string& v) { args.algorithm = v; });
  from_file("--T", "T", [&](const std::string& v) { config.horizon = std::stoull(v); });
  from_file("--sigma", "sigma", [&](const std::string& v) { config.sigma = std::stod(v); });
  from_file("--d", "d", [&](const std::string& v) { config.d = std::stoi(v); });
  from_file("--c1", "c1", [&](const std::string& v) { config.c1 = std::stod(v); });
  from_file("--c2", "c2", [&](const std::string& v) { config.c2 = std::stod(v); });
  from_file("--mode", "mode", [&](const std::string& v) { args.mode = v; });
  from_file("--seeds", "seeds", [&](const std::string& v) { config.seeds = parse_seed_list(v); });
  from_file("--out", "out", [&](const std::string& v) { config.out_dir = v; });
  from_file("--doubling", "doubling",
            [&](const std::string& v) { config.doubling = v == "true" || v == "1"; });
  from_file("--doubling-initial", "doubling-initial",
            [&](const std::string& v) { config.doubling_initial = std::stoull(v); });
  from_file("--function", "function", [&](const std::string& v) { config.function = v; });
  from_file("--minimizer", "minimizer",
            [&](const std::string& v) { config.minimizer = parse_double_list(v); });
  from_file("--fn-scale", "fn-scale", [&](const std::string& v) { config.scale = std::stod(v); });
  from_file("--noise", "noise", [&](const std::string& v) { args.noise = v; });
  from_file("--log", "log", [&](const std::string& v) { args.granularity = v; });
}

int do_run(RunArgs& args, const CLI::App& cmd) {
  apply_config_file(args, cmd);
  cbopt::ExperimentConfig config = args.config;
  config.algorithm = args.algorithm == "nd" ? cbopt::AlgorithmKind::ND : cbopt::AlgorithmKind::OneD;
  config.mode = args.mode == "theory"          ? cbopt::RunMode::Theory
                : args.mode == "paper-literal" ? cbopt::RunMode::PaperLiteral
                                               : cbopt::RunMode::Practical;
  config.noise_family = args.noise == "bounded-uniform" ? cbopt::NoiseFamily::BoundedUniform
                                                        : cbopt::NoiseFamily::Gaussian;
  // Constants default per mode when not given by flag or file.
  const bool practical = config.mode == cbopt::RunMode::Practical;
  if (cmd.count("--c1") == 0 && config.c1 == 2.0 && !practical) config.c1 = 64.0;
  if (cmd.count("--c2") == 0 && config.c2 == 0.5 && !practical) config.c2 = 1.0 / 32.0;
  if (args.granularity == "per-query")
    config.granularity = cbopt::LogGranularity::PerQuery;
  else if (args.granularity == "per-round")
    config.granularity = cbopt::LogGranularity::PerRound;
  else if (args.granularity == "per-epoch")
    config.granularity = cbopt::LogGranularity::PerEpoch;
  else
    config.granularity = config.horizon <= 1000000 ? cbopt::LogGranularity::PerQuery
                                                   : cbopt::LogGranularity::PerRound;
  if (config.algorithm == cbopt::AlgorithmKind::OneD) config.d = 1;

  const cbopt::ExperimentSummary summary = cbopt::run_experiment(config);
  if (summary.regret_bound_1d)
    std::cout << "closed-form regret bound: " << cbopt::format_g17(*summary.regret_bound_1d) << "\n";
  for (const auto& outcome : summary.outcomes) {
    std::cout << "seed " << outcome.seed << ": regret " << cbopt::format_g17(outcome.regret)
              << ", queries " << outcome.queries << ", epochs " << outcome.epochs
              << ", suboptimality " << cbopt::format_g17(outcome.recommendation_suboptimality)
              << ", stop " << outcome.stop_reason << "\n";
  }
  if (!config.out_dir.empty()) std::cout << "outputs written to " << config.out_dir << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"stochastic convex optimization with bandit feedback"};
  app.require_subcommand(1);

  RunArgs run_args;
  CLI::App* run_cmd = app.add_subcommand("run", "execute seeded optimization runs");
  run_cmd->add_option("--config", run_args.config_path, "key = value experiment file");
  run_cmd->add_option("--algorithm", run_args.algorithm)
      ->check(CLI::IsMember({"1d", "nd"}));
  run_cmd->add_option("--T", run_args.config.horizon, "query budget and analysis horizon");
  run_cmd->add_option("--sigma", run_args.config.sigma);
  run_cmd->add_option("--d", run_args.config.d);
  run_cmd->add_option("--c1", run_args.config.c1);
  run_cmd->add_option("--c2", run_args.config.c2);
  run_cmd->add_option("--mode", run_args.mode)
      ->check(CLI::IsMember({"theory", "practical", "paper-literal"}));
  run_cmd->add_option("--seeds", run_args.config.seeds)->delimiter(',');
  run_cmd->add_option("--out", run_args.config.out_dir);
  run_cmd->add_flag("--doubling", run_args.config.doubling);
  run_cmd->add_option("--doubling-initial", run_args.config.doubling_initial);
  run_cmd->add_option("--function", run_args.config.function);
  run_cmd->add_option("--minimizer", run_args.config.minimizer)->delimiter(',');
  run_cmd->add_option("--fn-scale", run_args.config.scale);
  run_cmd->add_option("--noise", run_args.noise)
      ->check(CLI::IsMember({"gaussian", "bounded-uniform"}));
  run_cmd->add_option("--log", run_args.granularity)
      ->check(CLI::IsMember({"auto", "per-query", "per-round", "per-epoch"}));

  std::uint64_t bound_t = 0;
  double bound_sigma = 0.0;
  CLI::App* bound_cmd = app.add_subcommand("bound", "print the 1d regret bound");
  bound_cmd->add_option("--T", bound_t)->required();
  bound_cmd->add_option("--sigma", bound_sigma)->required();

  int geo_d = 2;
  std::uint64_t geo_trials = 100000;
  CLI::App* geo_cmd = app.add_subcommand("verify-geometry", "run the Monte-Carlo geometry oracles");
  geo_cmd->add_option("--d", geo_d)->check(CLI::Range(2, 16));
  geo_cmd->add_option("--trials", geo_trials);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;  // bad flags and config files are config errors
  }

  try {
    if (run_cmd->parsed()) return do_run(run_args, *run_cmd);
    if (bound_cmd->parsed()) {
      std::cout << cbopt::format_g17(cbopt::theoretical_bound_1d(bound_t, bound_sigma)) << "\n";
      return 0;
    }
    if (geo_cmd->parsed()) return cbopt::verify_geometry(geo_d, geo_trials, std::cout) ? 0 : 2;
  } catch (const cbopt::PreconditionError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
