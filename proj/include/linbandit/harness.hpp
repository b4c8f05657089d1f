#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "linbandit/diagnostics.hpp"
#include "linbandit/environment.hpp"
#include "linbandit/policy.hpp"

namespace linbandit {

/// Invalid configuration; the message names the offending key.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct PolicySpec {
  std::string label;
  PolicyConfig config;
};

struct ExperimentConfig {
  Eigen::Index dim = 2;
  std::int64_t horizon = 1000;
  std::int64_t replications = 10;
  std::uint64_t seed = 1;
  /// Worker threads; 0 picks the hardware concurrency.
  int threads = 0;
  SetSpec sets;
  NoiseKind noise = NoiseKind::kGaussian;
  ThetaMode theta_mode = ThetaMode::kUniformSphere;
  Eigen::VectorXd theta;
  std::vector<PolicySpec> policies;
  std::filesystem::path output = "results";

  EllipticalConfig elliptical;
  TailConfig tail;
  ScalingConfig scaling;

  /// Throws ConfigError. Fills policy schedules with (horizon, dim).
  void finalize();
  InstanceSpec instance_spec() const;
};

/// Flat INI text: an [experiment] section, one [policy:<label>] section per
/// policy, and [elliptical], [tail], [scaling] sections for diagnostics.
/// Every key has a default; unknown sections or keys throw ConfigError.
ExperimentConfig parse_config(std::istream& in);
ExperimentConfig load_config(const std::filesystem::path& path);
/// Default configuration (one vcl_ucb policy), already finalized.
ExperimentConfig default_config();

/// Type-7 (linear interpolation) sample quantile, q in [0, 1].
double quantile(std::vector<double> values, double q);

struct PolicyResult {
  std::string label;
  PolicyKind kind = PolicyKind::kVclUcb;
  /// records[replication][round]
  std::vector<std::vector<RoundRecord>> records;
  std::vector<double> final_regret;
  std::vector<double> mean_curve;
  std::vector<double> q10_curve;
  std::vector<double> q50_curve;
  std::vector<double> q90_curve;
  double final_mean = 0.0;
  double final_median = 0.0;
  double final_q10 = 0.0;
  double final_q90 = 0.0;
  /// median R_T / sqrt(d^2 T ln T)
  double normalized_median = 0.0;
  std::int64_t unconverged_rounds = 0;
};

struct RunResult {
  Eigen::Index dim = 0;
  std::int64_t horizon = 0;
  std::int64_t replications = 0;
  std::vector<PolicyResult> policies;
};

/// Mean and 10/50/90 quantile curves across replications, plus the final
/// regret summary.
void aggregate(PolicyResult& result, Eigen::Index dim, std::int64_t horizon);

/// Runs every policy on replications 1..R with seeds base ^ r. Results do
/// not depend on the thread count.
RunResult run_experiment(const ExperimentConfig& config);

/// Writes <label>_rounds.csv, <label>_curve.csv and summary.csv under
/// config.output. Throws std::runtime_error when a file cannot be written.
void write_outputs(const RunResult& result, const std::filesystem::path& directory);

inline constexpr const char* kRoundCsvHeader =
    "replication,t,omega,alpha,action_norm,reward,instant_regret,cumulative_regret,opt_converged";
inline constexpr const char* kSummaryCsvHeader =
    "policy,d,T,replications,final_regret_mean,final_regret_median,final_regret_q10,"
    "final_regret_q90,normalized_regret_median";

/// One row of the per-round CSV.
struct RoundRow {
  std::int64_t replication = 0;
  std::int64_t t = 0;
  double omega = 0.0;
  double alpha = 0.0;
  double action_norm = 0.0;
  double reward = 0.0;
  double instant_regret = 0.0;
  double cumulative_regret = 0.0;
  bool converged = true;

  bool operator==(const RoundRow&) const = default;
};

RoundRow to_row(std::int64_t replication, const RoundRecord& record);
/// Shortest round-trip formatting, at most 17 significant digits.
std::string format_double(double value);
void write_round_csv(std::ostream& out, const PolicyResult& result);
std::vector<RoundRow> read_round_csv(std::istream& in);
void write_summary_csv(std::ostream& out, const RunResult& result);

}  // namespace linbandit
