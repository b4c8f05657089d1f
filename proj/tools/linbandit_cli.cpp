// Command-line front end: `run` for Monte-Carlo experiments, `diagnose` for
// the estimator and regret-scaling checks.
//
// Exit codes: 0 success, 1 configuration or I/O error, 2 diagnostic failure.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "linbandit/harness.hpp"

namespace {

constexpr const char* kVersion = "linbandit 1.0.0";

constexpr int kExitConfig = 1;
constexpr int kExitDiagnostic = 2;

struct RunOverrides {
  std::string config_path;
  std::optional<std::string> out;
  std::optional<std::int64_t> replications;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> policy;
  std::optional<std::int64_t> horizon;
  std::optional<Eigen::Index> dim;
  std::optional<std::string> env;
  std::optional<std::string> noise;
  std::optional<double> constant_c;
  std::optional<int> threads;
};

linbandit::ExperimentConfig load(const std::string& path) {
  if (path.empty()) return linbandit::ExperimentConfig{};
  return linbandit::load_config(path);
}

void apply(const RunOverrides& o, linbandit::ExperimentConfig& config) {
  using linbandit::ConfigError;
  if (o.out) config.output = *o.out;
  if (o.replications) config.replications = *o.replications;
  if (o.seed) config.seed = *o.seed;
  if (o.horizon) config.horizon = *o.horizon;
  if (o.dim) config.dim = *o.dim;
  if (o.threads) config.threads = *o.threads;
  if (o.env) {
    const auto spec = linbandit::parse_set_spec(*o.env);
    if (!spec) throw ConfigError("invalid value for --env: '" + *o.env + "'");
    config.sets = *spec;
  }
  if (o.noise) {
    const auto kind = linbandit::parse_noise_kind(*o.noise);
    if (!kind) throw ConfigError("invalid value for --noise: '" + *o.noise + "'");
    config.noise = *kind;
  }
  if (o.policy) {
    const auto kind = linbandit::parse_policy_kind(*o.policy);
    if (!kind) throw ConfigError("invalid value for --policy: '" + *o.policy + "'");
    linbandit::PolicySpec spec;
    spec.label = *o.policy;
    spec.config.kind = *kind;
    config.policies = {spec};
  }
  if (o.constant_c) {
    if (config.policies.empty()) config.policies.push_back({"vcl_ucb", {}});
    for (auto& spec : config.policies) spec.config.bonus_constant = *o.constant_c;
  }
  config.finalize();
}

int run(const RunOverrides& overrides) {
  linbandit::ExperimentConfig config = load(overrides.config_path);
  apply(overrides, config);
  const linbandit::RunResult result = linbandit::run_experiment(config);
  linbandit::write_outputs(result, config.output);

  for (const auto& policy : result.policies) {
    std::printf("%-12s final regret median %.4f mean %.4f  normalized %.4f\n",
                policy.label.c_str(), policy.final_median, policy.final_mean,
                policy.normalized_median);
    if (policy.unconverged_rounds > 0) {
      std::fprintf(stderr, "warning: %s: %lld rounds without an optimizer certificate\n",
                   policy.label.c_str(), static_cast<long long>(policy.unconverged_rounds));
    }
  }
  std::printf("wrote %s\n", config.output.string().c_str());
  return 0;
}

int diagnose(const std::string& which, const std::string& config_path) {
  linbandit::ExperimentConfig config = load(config_path);
  config.finalize();
  bool passed = false;
  if (which == "elliptical") {
    const auto report = linbandit::diagnostic_elliptical(config.elliptical);
    std::printf("elliptical trials=%lld violations=%lld max_ratio=%.6f\n",
                static_cast<long long>(report.trials), static_cast<long long>(report.violations),
                report.max_ratio);
    for (auto seed : report.offending_seeds) {
      std::printf("  violation at seed %llu\n", static_cast<unsigned long long>(seed));
    }
    passed = report.passed();
  } else if (which == "tail") {
    const auto report = linbandit::diagnostic_tail_bound(config.tail);
    std::printf("tail delta=%g replications=%lld quantile=%.6f reference=%.6f ratio=%.6f limit=%g\n",
                config.tail.delta, static_cast<long long>(config.tail.replications),
                report.quantile, report.reference, report.ratio, config.tail.ratio_limit);
    passed = report.passed;
  } else if (which == "scaling") {
    const auto report = linbandit::scaling_report(config.scaling);
    std::printf("d,T,median_regret,mean_regret,normalized\n");
    for (const auto& row : report.rows) {
      std::printf("%lld,%lld,%.6f,%.6f,%.6f\n", static_cast<long long>(row.dim),
                  static_cast<long long>(row.horizon), row.median_regret, row.mean_regret,
                  row.normalized);
    }
    for (const auto& [d, growth] : report.growth) {
      std::printf("growth d=%lld ratio=%.4f limit=%g\n", static_cast<long long>(d), growth,
                  config.scaling.ratio_limit);
    }
    passed = report.passed;
  } else {
    throw linbandit::ConfigError("unknown diagnostic '" + which + "'");
  }
  std::printf("%s\n", passed ? "PASS" : "FAIL");
  return passed ? 0 : kExitDiagnostic;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Linear contextual bandit simulator with varying-confidence UCB"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  RunOverrides overrides;
  auto* run_cmd = app.add_subcommand("run", "Run a seeded Monte-Carlo experiment");
  run_cmd->add_option("--config", overrides.config_path, "Experiment config (INI)");
  run_cmd->add_option("--out", overrides.out, "Output directory");
  run_cmd->add_option("--replications", overrides.replications, "Replications per policy");
  run_cmd->add_option("--seed", overrides.seed, "Base seed");
  run_cmd->add_option("--policy", overrides.policy, "vcl_ucb|oful|greedy|random");
  run_cmd->add_option("--horizon", overrides.horizon, "Horizon T");
  run_cmd->add_option("--dim", overrides.dim, "Dimension d");
  run_cmd->add_option("--env", overrides.env, "unit_ball|finite:<k>|iid_finite:<k>|clipped_ball:<m>");
  run_cmd->add_option("--noise", overrides.noise, "gaussian|rademacher|uniform");
  run_cmd->add_option("--constant-c", overrides.constant_c, "Bonus constant C");
  run_cmd->add_option("--threads", overrides.threads, "Worker threads (0 = all cores)");

  std::string which;
  std::string diag_config;
  auto* diag_cmd = app.add_subcommand("diagnose", "Run a diagnostic");
  diag_cmd->add_option("which", which, "elliptical|tail|scaling")
      ->required()
      ->check(CLI::IsMember({"elliptical", "tail", "scaling"}));
  diag_cmd->add_option("--config", diag_config, "Config with diagnostic sections");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*run_cmd) return run(overrides);
    if (*diag_cmd) return diagnose(which, diag_config);
  } catch (const linbandit::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  }
  return 0;
}
