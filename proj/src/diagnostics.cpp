#include "linbandit/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "linbandit/harness.hpp"
#include "linbandit/parallel.hpp"

namespace linbandit {

EllipticalSums elliptical_sums(const std::vector<Eigen::VectorXd>& sequence) {
  EllipticalSums sums;
  if (sequence.empty()) return sums;
  RidgeState state(sequence.front().size());
  for (const auto& y : sequence) {
    const double w = state.width(y);
    sums.potential += w * w;
    state.update(y, 0.0);
  }
  sums.bound = 2.0 * state.log_det_factored();
  return sums;
}

void EllipticalConfig::validate() const {
  if (trials < 1 || horizon < 1 || dim < 1) {
    throw std::invalid_argument("elliptical: trials, horizon and dim must be positive");
  }
  if (!(tolerance >= 0.0)) throw std::invalid_argument("elliptical: tolerance must be nonnegative");
}

EllipticalReport diagnostic_elliptical(const EllipticalConfig& config) {
  config.validate();
  EllipticalReport report;
  report.trials = config.trials;
  for (std::int64_t trial = 1; trial <= config.trials; ++trial) {
    const std::uint64_t seed = replication_seed(config.seed, static_cast<std::uint64_t>(trial));
    Rng rng = make_stream(seed, Stream::kDiagnostic);
    std::vector<Eigen::VectorXd> sequence;
    sequence.reserve(static_cast<std::size_t>(config.horizon));
    for (std::int64_t t = 0; t < config.horizon; ++t) {
      sequence.push_back(uniform_ball(config.dim, rng));
    }
    const EllipticalSums sums = elliptical_sums(sequence);
    if (sums.bound > 0.0) {
      report.max_ratio = std::max(report.max_ratio, sums.potential / sums.bound);
    }
    if (sums.potential > sums.bound + config.tolerance) {
      ++report.violations;
      report.offending_seeds.push_back(seed);
    }
  }
  return report;
}

double normalized_error(const RidgeState& state, const Eigen::VectorXd& theta) {
  const Eigen::VectorXd error = state.estimate() - theta;
  return std::sqrt(std::max(0.0, error.dot(state.gram() * error)));
}

void TailConfig::validate() const {
  if (!(delta > 0.0 && delta <= 0.5)) {
    throw std::invalid_argument("tail: delta must lie in (0, 1/2]");
  }
  if (replications < 100) {
    throw std::invalid_argument("tail: need at least 100 replications");
  }
  if (round < 1 || dim < 1) {
    throw std::invalid_argument("tail: round and dimension must be positive");
  }
  if (!(ratio_limit > 0.0)) throw std::invalid_argument("tail: ratio_limit must be positive");
}

TailReport diagnostic_tail_bound(const TailConfig& config) {
  config.validate();
  TailReport report;
  report.errors.resize(static_cast<std::size_t>(config.replications));
  for (std::int64_t r = 0; r < config.replications; ++r) {
    const std::uint64_t seed = replication_seed(config.seed, static_cast<std::uint64_t>(r + 1));
    Rng theta_rng = make_stream(seed, Stream::kTheta);
    Rng action_rng = make_stream(seed, Stream::kActionSets);
    Rng noise_rng = make_stream(seed, Stream::kNoise);
    const Eigen::VectorXd theta = uniform_sphere(config.dim, theta_rng);
    RidgeState state(config.dim);
    for (std::int64_t s = 1; s < config.round; ++s) {
      const Eigen::VectorXd x = uniform_sphere(config.dim, action_rng);
      state.update(x, x.dot(theta) + draw_noise(config.noise, noise_rng));
    }
    report.errors[static_cast<std::size_t>(r)] = normalized_error(state, theta);
  }
  report.quantile = quantile(report.errors, 1.0 - config.delta);
  report.reference =
      std::sqrt(static_cast<double>(config.dim)) + std::sqrt(std::log(1.0 / config.delta));
  report.ratio = report.quantile / report.reference;
  report.passed = report.ratio <= config.ratio_limit;
  return report;
}

void ScalingConfig::validate() const {
  if (horizons.size() < 3) {
    throw std::invalid_argument("scaling: need at least three horizons");
  }
  const double step = static_cast<double>(horizons[1]) / static_cast<double>(horizons[0]);
  for (std::size_t i = 1; i < horizons.size(); ++i) {
    const double r = static_cast<double>(horizons[i]) / static_cast<double>(horizons[i - 1]);
    if (horizons[i - 1] < 2 || !(step > 1.0) || std::abs(r - step) > 1e-9 * step) {
      throw std::invalid_argument("scaling: horizons must form an increasing geometric progression");
    }
  }
  if (dims.empty() || replications < 1) {
    throw std::invalid_argument("scaling: need dimensions and replications");
  }
  for (Eigen::Index d : dims) {
    if (d < 1) throw std::invalid_argument("scaling: dimensions must be positive");
  }
  if (!(bonus_constant > 0.0)) throw std::invalid_argument("scaling: constant_c must be positive");
  if (!(ratio_limit > 0.0)) throw std::invalid_argument("scaling: ratio_limit must be positive");
}

ScalingReport scaling_report(const ScalingConfig& config) {
  config.validate();
  const auto& horizons = config.horizons;

  const std::size_t cells = config.dims.size() * horizons.size();
  const std::size_t reps = static_cast<std::size_t>(config.replications);
  std::vector<double> finals(cells * reps, 0.0);
  parallel_for(cells * reps, config.threads, [&](std::size_t job) {
    const std::size_t cell = job / reps;
    const std::size_t r = job % reps;
    InstanceSpec spec;
    spec.dim = config.dims[cell / horizons.size()];
    spec.horizon = horizons[cell % horizons.size()];
    spec.theta_mode = ThetaMode::kUniformSphere;
    spec.noise = config.noise;
    spec.sets = config.sets;
    PolicyConfig policy;
    policy.kind = config.policy;
    policy.bonus_constant = config.bonus_constant;
    policy.schedule = {spec.horizon, static_cast<std::int64_t>(spec.dim), false};
    Instance instance(spec, replication_seed(config.seed, r + 1));
    finals[job] = run_episode(instance, policy).back().cumulative_regret;
  });

  ScalingReport report;
  report.passed = true;
  for (std::size_t di = 0; di < config.dims.size(); ++di) {
    const double d = static_cast<double>(config.dims[di]);
    double first = 0.0;
    double last = 0.0;
    for (std::size_t hi = 0; hi < horizons.size(); ++hi) {
      const std::size_t cell = di * horizons.size() + hi;
      std::vector<double> values(finals.begin() + static_cast<std::ptrdiff_t>(cell * reps),
                                 finals.begin() + static_cast<std::ptrdiff_t>((cell + 1) * reps));
      ScalingRow row;
      row.dim = config.dims[di];
      row.horizon = horizons[hi];
      const double t = static_cast<double>(row.horizon);
      row.median_regret = quantile(values, 0.5);
      double sum = 0.0;
      for (double v : values) sum += v;
      row.mean_regret = sum / static_cast<double>(values.size());
      row.normalized = row.median_regret / std::sqrt(d * d * t * std::log(t));
      if (hi == 0) first = row.normalized;
      last = row.normalized;
      report.rows.push_back(row);
    }
    const double growth = last / first;
    report.growth.emplace_back(config.dims[di], growth);
    if (!(growth <= config.ratio_limit)) report.passed = false;
  }
  return report;
}

ConcavityProbe probe_concavity(const RidgeState& state, const ConfidenceSchedule& schedule,
                               double bonus_constant, const ActionSet& set,
                               std::int64_t triples, Rng& rng, double tolerance) {
  if (!set.is_convex()) {
    throw std::invalid_argument("probe_concavity: needs a convex action set");
  }
  const double scale = schedule.scale();
  auto clamped = [&](const Eigen::VectorXd& x) {
    const double w = state.width(x);
    return scale * w * w < 1.0;
  };
  auto value = [&](const Eigen::VectorXd& x) {
    return index_gradient(state, schedule, bonus_constant, x).value;
  };
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  ConcavityProbe probe;
  for (std::int64_t k = 0; k < triples; ++k) {
    const Eigen::VectorXd x = project(set, uniform_ball(set.dim(), rng));
    const Eigen::VectorXd y = project(set, uniform_ball(set.dim(), rng));
    const double lambda = unit(rng);
    const Eigen::VectorXd mix = lambda * x + (1.0 - lambda) * y;
    const double gap = lambda * value(x) + (1.0 - lambda) * value(y) - value(mix);
    const bool in_clamp = clamped(x) || clamped(y) || clamped(mix);
    const bool violated = gap > tolerance;
    if (in_clamp) {
      ++probe.clamped_triples;
      probe.clamped_violations += violated ? 1 : 0;
    } else {
      ++probe.unclamped_triples;
      probe.unclamped_violations += violated ? 1 : 0;
    }
    probe.worst_gap = std::max(probe.worst_gap, gap);
  }
  return probe;
}

}  // namespace linbandit
