#include "linbandit/environment.hpp"

#include <charconv>
#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

namespace linbandit {

std::string_view to_string(NoiseKind kind) {
  switch (kind) {
    case NoiseKind::kGaussian:
      return "gaussian";
    case NoiseKind::kRademacher:
      return "rademacher";
    case NoiseKind::kUniform:
      return "uniform";
    case NoiseKind::kZero:
      return "zero";
  }
  return "unknown";
}

std::optional<NoiseKind> parse_noise_kind(std::string_view name) {
  if (name == "gaussian" || name == "gaussian_unit") return NoiseKind::kGaussian;
  if (name == "rademacher") return NoiseKind::kRademacher;
  if (name == "uniform" || name == "uniform_pm1") return NoiseKind::kUniform;
  if (name == "zero") return NoiseKind::kZero;
  return std::nullopt;
}

namespace {

std::optional<int> parse_count(std::string_view text) {
  int value = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || value < 1) return std::nullopt;
  return value;
}

}  // namespace

std::optional<SetSpec> parse_set_spec(std::string_view text) {
  SetSpec spec;
  if (text == "unit_ball") {
    spec.kind = SetGenerator::kUnitBall;
    return spec;
  }
  const auto colon = text.find(':');
  if (colon == std::string_view::npos) {
    if (text == "finite") {
      // Arms supplied separately.
      spec.kind = SetGenerator::kFixedFinite;
      return spec;
    }
    return std::nullopt;
  }
  const std::string_view head = text.substr(0, colon);
  const auto count = parse_count(text.substr(colon + 1));
  if (!count) return std::nullopt;
  spec.count = *count;
  if (head == "finite" || head == "fixed_finite") {
    spec.kind = SetGenerator::kFixedFinite;
  } else if (head == "iid_finite" || head == "iid_sphere_finite") {
    spec.kind = SetGenerator::kIidSphereFinite;
  } else if (head == "clipped_ball") {
    spec.kind = SetGenerator::kClippedBall;
  } else {
    return std::nullopt;
  }
  return spec;
}

std::string to_string(const SetSpec& spec) {
  switch (spec.kind) {
    case SetGenerator::kFixedFinite:
      return spec.arms.empty() ? "finite:" + std::to_string(spec.count) : "finite";
    case SetGenerator::kIidSphereFinite:
      return "iid_finite:" + std::to_string(spec.count);
    case SetGenerator::kUnitBall:
      return "unit_ball";
    case SetGenerator::kClippedBall:
      return "clipped_ball:" + std::to_string(spec.count);
  }
  return "unknown";
}

void InstanceSpec::validate() const {
  if (dim < 1) throw std::invalid_argument("InstanceSpec: dimension must be positive");
  if (horizon < 1) throw std::invalid_argument("InstanceSpec: horizon must be positive");
  if (theta_mode == ThetaMode::kFixed) {
    if (theta.size() != dim) {
      throw std::invalid_argument("InstanceSpec: fixed theta has dimension " +
                                  std::to_string(theta.size()) + ", expected " +
                                  std::to_string(dim));
    }
    if (!theta.allFinite() || theta.norm() > 1.0 + 1e-12) {
      throw std::invalid_argument("InstanceSpec: theta must lie in the unit ball");
    }
  }
  switch (sets.kind) {
    case SetGenerator::kFixedFinite:
      if (sets.arms.empty() && sets.count < 1) {
        throw std::invalid_argument("InstanceSpec: finite set needs arms or a positive count");
      }
      for (const auto& arm : sets.arms) {
        if (arm.size() != dim) {
          throw std::invalid_argument("InstanceSpec: arm dimension does not match");
        }
      }
      break;
    case SetGenerator::kIidSphereFinite:
      if (sets.count < 1) throw std::invalid_argument("InstanceSpec: finite set needs k >= 1");
      break;
    case SetGenerator::kClippedBall:
      if (sets.count < 1) {
        throw std::invalid_argument("InstanceSpec: clipped ball needs at least one constraint");
      }
      break;
    case SetGenerator::kUnitBall:
      break;
  }
}

namespace {

std::vector<Eigen::VectorXd> sphere_points(Eigen::Index dim, int count, Rng& rng) {
  std::vector<Eigen::VectorXd> points;
  points.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) points.push_back(uniform_sphere(dim, rng));
  return points;
}

ActionSet random_clipped_ball(Eigen::Index dim, int constraints, Rng& rng) {
  std::uniform_real_distribution<double> margin(0.1, 0.9);
  Eigen::VectorXd interior = 0.5 * uniform_ball(dim, rng);
  std::vector<Halfspace> halfspaces;
  for (int i = 0; i < constraints; ++i) {
    Halfspace h;
    h.normal = uniform_sphere(dim, rng);
    h.offset = h.normal.dot(interior) + margin(rng);
    halfspaces.push_back(std::move(h));
  }
  return ActionSet::clipped_ball(std::move(halfspaces), std::move(interior));
}

}  // namespace

Instance::Instance(InstanceSpec spec, std::uint64_t seed) : spec_(std::move(spec)), seed_(seed) {
  spec_.validate();
  Rng theta_rng = make_stream(seed_, Stream::kTheta);
  switch (spec_.theta_mode) {
    case ThetaMode::kFixed:
      theta_ = spec_.theta;
      break;
    case ThetaMode::kUniformSphere:
      theta_ = uniform_sphere(spec_.dim, theta_rng);
      break;
    case ThetaMode::kUniformBall:
      theta_ = uniform_ball(spec_.dim, theta_rng);
      break;
  }

  // Episode-level sets come from the theta stream so that the per-round
  // action-set stream is untouched by them.
  switch (spec_.sets.kind) {
    case SetGenerator::kFixedFinite:
      fixed_set_ = std::make_shared<const ActionSet>(ActionSet::finite(
          spec_.sets.arms.empty() ? sphere_points(spec_.dim, spec_.sets.count, theta_rng)
                                  : spec_.sets.arms));
      break;
    case SetGenerator::kUnitBall:
      fixed_set_ = std::make_shared<const ActionSet>(ActionSet::unit_ball(spec_.dim));
      break;
    case SetGenerator::kClippedBall:
      fixed_set_ = std::make_shared<const ActionSet>(
          random_clipped_ball(spec_.dim, spec_.sets.count, theta_rng));
      break;
    case SetGenerator::kIidSphereFinite:
      break;
  }
}

std::shared_ptr<const ActionSet> Instance::next_set(Rng& rng) const {
  if (fixed_set_) return fixed_set_;
  return std::make_shared<const ActionSet>(
      ActionSet::finite(sphere_points(spec_.dim, spec_.sets.count, rng)));
}

double draw_noise(NoiseKind kind, Rng& rng) {
  switch (kind) {
    case NoiseKind::kGaussian: {
      std::normal_distribution<double> normal(0.0, 1.0);
      return normal(rng);
    }
    case NoiseKind::kRademacher:
      return (rng() >> 63) ? 1.0 : -1.0;
    case NoiseKind::kUniform: {
      std::uniform_real_distribution<double> uniform(-1.0, 1.0);
      return uniform(rng);
    }
    case NoiseKind::kZero:
      return 0.0;
  }
  return 0.0;
}

double reward(const Instance& instance, const Eigen::Ref<const Eigen::VectorXd>& action) {
  if (action.size() != instance.dim()) {
    throw std::invalid_argument("reward: action dimension mismatch");
  }
  return action.dot(instance.theta());
}

double instant_regret(const Instance& instance, const ActionSet& set,
                      const Eigen::Ref<const Eigen::VectorXd>& action) {
  if (action.size() != instance.dim() || set.dim() != instance.dim()) {
    throw std::invalid_argument("instant_regret: dimension mismatch");
  }
  if (!set.contains(action, kFeasibilityTolerance)) {
    throw std::invalid_argument("instant_regret: action is not in the action set");
  }
  return maximize_linear(set, instance.theta()).value - action.dot(instance.theta());
}

std::vector<RoundRecord> run_episode(const Instance& instance, Policy& policy) {
  if (policy.dim() != instance.dim()) {
    throw std::invalid_argument("run_episode: policy dimension does not match instance");
  }
  Rng set_rng = make_stream(instance.seed(), Stream::kActionSets);
  Rng noise_rng = make_stream(instance.seed(), Stream::kNoise);

  std::vector<RoundRecord> records;
  records.reserve(static_cast<std::size_t>(instance.horizon()));
  double cumulative = 0.0;
  std::shared_ptr<const ActionSet> previous_set;
  double supremum = 0.0;
  for (std::int64_t t = 1; t <= instance.horizon(); ++t) {
    const std::shared_ptr<const ActionSet> set = instance.next_set(set_rng);
    if (set != previous_set) {
      supremum = maximize_linear(*set, instance.theta()).value;
      previous_set = set;
    }
    Selection selection = policy.select(*set);
    if (!set->contains(selection.action, kFeasibilityTolerance)) {
      throw std::runtime_error("run_episode: policy selected an infeasible action at round " +
                               std::to_string(t));
    }
    const double mean = reward(instance, selection.action);
    const double observed = mean + draw_noise(instance, noise_rng);
    const double regret = supremum - mean;
    policy.observe(selection.action, observed);

    cumulative += regret;
    RoundRecord record;
    record.t = t;
    record.action = std::move(selection.action);
    record.reward = observed;
    record.omega = selection.omega;
    record.alpha = selection.alpha;
    record.converged = selection.converged;
    record.instant_regret = regret;
    record.cumulative_regret = cumulative;
    records.push_back(std::move(record));
  }
  return records;
}

std::vector<RoundRecord> run_episode(const Instance& instance, const PolicyConfig& config) {
  Policy policy(config, instance.dim(), instance.seed());
  return run_episode(instance, policy);
}

}  // namespace linbandit
