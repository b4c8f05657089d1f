#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "linbandit/action_set.hpp"
#include "linbandit/policy.hpp"
#include "linbandit/random.hpp"

namespace linbandit {

/// Centered noise laws with sub-Gaussian variance proxy at most 1. kZero is
/// a noiseless hook for diagnostics.
enum class NoiseKind { kGaussian, kRademacher, kUniform, kZero };

enum class ThetaMode { kFixed, kUniformSphere, kUniformBall };

enum class SetGenerator {
  kFixedFinite,      // k points on the sphere drawn once per episode, or explicit arms
  kIidSphereFinite,  // k points on the sphere redrawn every round
  kUnitBall,
  kClippedBall,      // ball cut by m random halfspaces, drawn once per episode
};

std::string_view to_string(NoiseKind kind);
std::optional<NoiseKind> parse_noise_kind(std::string_view name);

struct SetSpec {
  SetGenerator kind = SetGenerator::kUnitBall;
  int count = 0;
  /// Explicit members for kFixedFinite; when empty, `count` points are drawn.
  std::vector<Eigen::VectorXd> arms;
};

/// Parses "unit_ball", "finite:<k>", "iid_finite:<k>", "clipped_ball:<m>".
std::optional<SetSpec> parse_set_spec(std::string_view text);
std::string to_string(const SetSpec& spec);

struct InstanceSpec {
  Eigen::Index dim = 2;
  std::int64_t horizon = 1000;
  ThetaMode theta_mode = ThetaMode::kUniformSphere;
  Eigen::VectorXd theta;  // used when theta_mode == kFixed
  NoiseKind noise = NoiseKind::kGaussian;
  SetSpec sets;

  void validate() const;
};

/// A concrete bandit problem: everything random about it is drawn from
/// streams of `seed`.
class Instance {
 public:
  Instance(InstanceSpec spec, std::uint64_t seed);

  Eigen::Index dim() const { return spec_.dim; }
  std::int64_t horizon() const { return spec_.horizon; }
  NoiseKind noise() const { return spec_.noise; }
  std::uint64_t seed() const { return seed_; }
  const Eigen::VectorXd& theta() const { return theta_; }
  const InstanceSpec& spec() const { return spec_; }

  /// Action set for the next round. Fixed generators hand back the same set.
  std::shared_ptr<const ActionSet> next_set(Rng& rng) const;

 private:
  InstanceSpec spec_;
  std::uint64_t seed_;
  Eigen::VectorXd theta_;
  std::shared_ptr<const ActionSet> fixed_set_;
};

double draw_noise(NoiseKind kind, Rng& rng);
inline double draw_noise(const Instance& instance, Rng& rng) {
  return draw_noise(instance.noise(), rng);
}

/// Mean reward <action, theta>.
double reward(const Instance& instance, const Eigen::Ref<const Eigen::VectorXd>& action);

/// sup_{x in set} <x, theta> - <action, theta>. Throws if `action` is not in
/// the set within kFeasibilityTolerance.
double instant_regret(const Instance& instance, const ActionSet& set,
                      const Eigen::Ref<const Eigen::VectorXd>& action);

inline constexpr double kFeasibilityTolerance = 1e-9;

struct RoundRecord {
  std::int64_t t = 0;
  Eigen::VectorXd action;
  double reward = 0.0;
  double omega = 0.0;
  double alpha = 1.0;
  bool converged = true;
  double instant_regret = 0.0;
  double cumulative_regret = 0.0;
};

/// Plays instance.horizon() rounds: draw set, select, reward plus noise,
/// observe, record. Deterministic in (instance seed, policy config, policy seed).
std::vector<RoundRecord> run_episode(const Instance& instance, Policy& policy);

/// Same, with the policy seeded from the instance seed.
std::vector<RoundRecord> run_episode(const Instance& instance, const PolicyConfig& config);

}  // namespace linbandit
