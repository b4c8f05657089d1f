#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "linbandit/action_set.hpp"
#include "linbandit/environment.hpp"
#include "linbandit/estimator.hpp"
#include "linbandit/policy.hpp"

namespace linbandit {

// Empirical checks of the estimator's confidence behaviour and of regret
// scaling. Thresholds here are desk-scale calibration constants.

struct EllipticalSums {
  /// sum_t y_t^T U_{t-1}^{-1} y_t
  double potential = 0.0;
  /// 2 ln det(U_T)
  double bound = 0.0;
};

/// Elliptical potential of one sequence of unit-ball vectors.
EllipticalSums elliptical_sums(const std::vector<Eigen::VectorXd>& sequence);

struct EllipticalConfig {
  std::int64_t trials = 1000;
  std::int64_t horizon = 200;
  Eigen::Index dim = 8;
  std::uint64_t seed = 7;
  double tolerance = 1e-9;

  /// Throws std::invalid_argument.
  void validate() const;
};

struct EllipticalReport {
  std::int64_t trials = 0;
  std::int64_t violations = 0;
  double max_ratio = 0.0;
  std::vector<std::uint64_t> offending_seeds;
  bool passed() const { return violations == 0; }
};

/// Each trial draws `horizon` uniform unit-ball vectors from seed ^ trial.
EllipticalReport diagnostic_elliptical(const EllipticalConfig& config);

struct TailConfig {
  double delta = 0.05;
  std::int64_t replications = 400;
  /// Round index t: the error is measured with the state after t - 1 updates.
  std::int64_t round = 500;
  Eigen::Index dim = 5;
  std::uint64_t seed = 11;
  NoiseKind noise = NoiseKind::kGaussian;
  double ratio_limit = 4.0;

  /// Throws std::invalid_argument.
  void validate() const;
};

struct TailReport {
  std::vector<double> errors;  // |estimate - theta|_gram per replication
  double quantile = 0.0;       // empirical (1 - delta) quantile
  double reference = 0.0;      // sqrt(d) + sqrt(ln(1/delta))
  double ratio = 0.0;
  bool passed = false;
};

/// |estimate - theta|_gram equals sup_x |<x, estimate - theta>| / width(x).
double normalized_error(const RidgeState& state, const Eigen::VectorXd& theta);

TailReport diagnostic_tail_bound(const TailConfig& config);

struct ScalingConfig {
  std::vector<Eigen::Index> dims{2, 5};
  std::vector<std::int64_t> horizons{1024, 4096, 16384};
  std::int64_t replications = 20;
  std::uint64_t seed = 2024;
  PolicyKind policy = PolicyKind::kVclUcb;
  double bonus_constant = 1.0;
  SetSpec sets;
  NoiseKind noise = NoiseKind::kGaussian;
  double ratio_limit = 1.5;
  int threads = 0;

  /// Throws std::invalid_argument.
  void validate() const;
};

struct ScalingRow {
  Eigen::Index dim = 0;
  std::int64_t horizon = 0;
  double median_regret = 0.0;
  double mean_regret = 0.0;
  /// median R_T / sqrt(d^2 T ln T)
  double normalized = 0.0;
};

struct ScalingReport {
  std::vector<ScalingRow> rows;
  /// Per dimension: normalized(T_max) / normalized(T_min).
  std::vector<std::pair<Eigen::Index, double>> growth;
  bool passed = false;
};

/// Requires at least three horizons in geometric progression.
ScalingReport scaling_report(const ScalingConfig& config);

struct ConcavityProbe {
  std::int64_t unclamped_triples = 0;
  std::int64_t unclamped_violations = 0;
  std::int64_t clamped_triples = 0;
  std::int64_t clamped_violations = 0;
  double worst_gap = 0.0;
};

/// Midpoint-style concavity test of the smoothed index on random triples
/// (x, y, lambda) from `set`. A triple counts as clamped when any of x, y or
/// the mixture sits in the region where ln_+ is clamped.
ConcavityProbe probe_concavity(const RidgeState& state, const ConfidenceSchedule& schedule,
                               double bonus_constant, const ActionSet& set,
                               std::int64_t triples, Rng& rng, double tolerance = 1e-9);

}  // namespace linbandit
