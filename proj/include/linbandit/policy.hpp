#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include <Eigen/Core>

#include "linbandit/action_set.hpp"
#include "linbandit/estimator.hpp"
#include "linbandit/random.hpp"

namespace linbandit {

enum class PolicyKind { kVclUcb, kOful, kGreedy, kRandom };

std::string_view to_string(PolicyKind kind);
/// Accepts "vcl_ucb", "oful", "greedy", "random".
std::optional<PolicyKind> parse_policy_kind(std::string_view name);

struct PolicyConfig {
  PolicyKind kind = PolicyKind::kVclUcb;
  /// Scale of the exploration bonus.
  double bonus_constant = 1.0;
  ConfidenceSchedule schedule;
  /// Failure probability behind the OFUL radius.
  double oful_delta = 0.1;
  /// Tolerance for maximization over infinite sets; sqrt(1/T) when unset.
  std::optional<double> argmax_slack;
  int restarts = 3;
  long max_iterations = 10000;

  void validate() const;
  double slack() const;
};

struct Selection {
  Eigen::VectorXd action;
  /// Width of the chosen action under the pre-update gram matrix.
  double omega = 0.0;
  /// Confidence level at omega; 1 when omega = 0, the common floor of both forms.
  double alpha = 1.0;
  bool converged = true;
  ConvexOptReport report;
};

/// One bandit learner: a ridge state plus an action-selection rule.
///
/// vcl_ucb  <x, estimate> + C (sqrt(d) + alpha(w)) w, alpha varying with the width w
/// oful     <x, estimate> + beta_t w with beta_t = sqrt(d ln((1 + t)/delta)) + 1
/// greedy   <x, estimate>
/// random   uniform member (finite) or uniform direction projected into the set
///
/// On finite sets vcl_ucb uses the max-form level unless the schedule asks
/// for the smooth one; on convex sets it always maximizes the smoothed index.
class Policy {
 public:
  Policy(PolicyConfig config, Eigen::Index dim, std::uint64_t seed);

  const PolicyConfig& config() const { return config_; }
  const RidgeState& state() const { return state_; }
  Eigen::Index dim() const { return state_.dim(); }

  /// Varying-confidence-level optimistic index, with the level form taken
  /// from the schedule. Zero-width actions get no bonus.
  double ucb_index(const Eigen::Ref<const Eigen::VectorXd>& action) const;
  double ucb_index(const Eigen::Ref<const Eigen::VectorXd>& action, bool smooth) const;

  double oful_radius() const;
  double oful_index(const Eigen::Ref<const Eigen::VectorXd>& action) const;

  Selection select(const ActionSet& set);
  void observe(const Eigen::Ref<const Eigen::VectorXd>& action, double reward);

 private:
  void check_action(const Eigen::Ref<const Eigen::VectorXd>& action) const;
  ConfidenceSchedule schedule(bool smooth) const;
  Selection select_vcl(const ActionSet& set);
  Selection select_oful(const ActionSet& set);
  Selection select_greedy(const ActionSet& set) const;
  Selection select_random(const ActionSet& set);
  void annotate(Selection& selection, bool smooth) const;
  AscentOptions ascent_options() const;

  PolicyConfig config_;
  RidgeState state_;
  Rng rng_;
  Eigen::VectorXd previous_;
};

}  // namespace linbandit
