#include "linbandit/policy.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace linbandit {

std::string_view to_string(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::kVclUcb:
      return "vcl_ucb";
    case PolicyKind::kOful:
      return "oful";
    case PolicyKind::kGreedy:
      return "greedy";
    case PolicyKind::kRandom:
      return "random";
  }
  return "unknown";
}

std::optional<PolicyKind> parse_policy_kind(std::string_view name) {
  if (name == "vcl_ucb") return PolicyKind::kVclUcb;
  if (name == "oful") return PolicyKind::kOful;
  if (name == "greedy") return PolicyKind::kGreedy;
  if (name == "random") return PolicyKind::kRandom;
  return std::nullopt;
}

void PolicyConfig::validate() const {
  schedule.validate();
  if (!(bonus_constant > 0.0) || !std::isfinite(bonus_constant)) {
    throw std::invalid_argument("PolicyConfig: bonus_constant must be positive");
  }
  if (!(oful_delta > 0.0 && oful_delta < 1.0)) {
    throw std::invalid_argument("PolicyConfig: oful_delta must lie in (0, 1)");
  }
  if (argmax_slack && !(*argmax_slack >= 0.0)) {
    throw std::invalid_argument("PolicyConfig: argmax_slack must be nonnegative");
  }
  if (restarts < 0) {
    throw std::invalid_argument("PolicyConfig: restarts must be nonnegative");
  }
  if (max_iterations < 1) {
    throw std::invalid_argument("PolicyConfig: max_iterations must be positive");
  }
}

double PolicyConfig::slack() const {
  if (argmax_slack) return *argmax_slack;
  return std::sqrt(1.0 / static_cast<double>(schedule.horizon));
}

Policy::Policy(PolicyConfig config, Eigen::Index dim, std::uint64_t seed)
    : config_(std::move(config)), state_(dim), rng_(make_stream(seed, Stream::kPolicy)) {
  config_.validate();
  if (config_.schedule.dim != dim) {
    throw std::invalid_argument("Policy: schedule dimension " +
                                std::to_string(config_.schedule.dim) +
                                " does not match action dimension " + std::to_string(dim));
  }
}

void Policy::check_action(const Eigen::Ref<const Eigen::VectorXd>& action) const {
  if (action.size() != dim()) {
    throw std::invalid_argument("Policy: action dimension mismatch");
  }
}

ConfidenceSchedule Policy::schedule(bool smooth) const {
  ConfidenceSchedule s = config_.schedule;
  s.smooth = smooth;
  return s;
}

double Policy::ucb_index(const Eigen::Ref<const Eigen::VectorXd>& action) const {
  return ucb_index(action, config_.schedule.smooth);
}

double Policy::ucb_index(const Eigen::Ref<const Eigen::VectorXd>& action, bool smooth) const {
  if (config_.kind != PolicyKind::kVclUcb) {
    throw std::logic_error("Policy::ucb_index: policy is not vcl_ucb");
  }
  check_action(action);
  const double mean = action.dot(state_.estimate());
  const double omega = state_.width(action);
  if (omega == 0.0) return mean;
  const double root_d = std::sqrt(static_cast<double>(dim()));
  return mean + config_.bonus_constant * (root_d + alpha(schedule(smooth), omega)) * omega;
}

double Policy::oful_radius() const {
  const double t = static_cast<double>(state_.rounds());
  return std::sqrt(static_cast<double>(dim()) * std::log((1.0 + t) / config_.oful_delta)) + 1.0;
}

double Policy::oful_index(const Eigen::Ref<const Eigen::VectorXd>& action) const {
  if (config_.kind != PolicyKind::kOful) {
    throw std::logic_error("Policy::oful_index: policy is not oful");
  }
  check_action(action);
  return action.dot(state_.estimate()) + oful_radius() * state_.width(action);
}

AscentOptions Policy::ascent_options() const {
  AscentOptions options;
  options.slack = config_.slack();
  if (!(options.slack > 0.0)) options.slack = 1e-12;
  options.restarts = config_.restarts;
  options.max_iterations = config_.max_iterations;
  const Eigen::VectorXd& estimate = state_.estimate();
  const double norm = estimate.norm();
  if (norm > 0.0) options.hints.push_back(estimate / norm);
  if (previous_.size() == dim()) options.hints.push_back(previous_);
  return options;
}

void Policy::annotate(Selection& selection, bool smooth) const {
  selection.omega = state_.width(selection.action);
  selection.alpha = selection.omega > 0.0 ? alpha(schedule(smooth), selection.omega) : 1.0;
}

Selection Policy::select(const ActionSet& set) {
  if (set.dim() != dim()) {
    throw std::invalid_argument("Policy::select: action set dimension mismatch");
  }
  Selection selection;
  switch (config_.kind) {
    case PolicyKind::kVclUcb:
      selection = select_vcl(set);
      break;
    case PolicyKind::kOful:
      selection = select_oful(set);
      break;
    case PolicyKind::kGreedy:
      selection = select_greedy(set);
      break;
    case PolicyKind::kRandom:
      selection = select_random(set);
      break;
  }
  previous_ = selection.action;
  return selection;
}

Selection Policy::select_vcl(const ActionSet& set) {
  Selection selection;
  Maximizer best;
  bool smooth = config_.schedule.smooth;
  if (set.is_convex()) {
    smooth = true;
    const ConfidenceSchedule s = schedule(true);
    const double c = config_.bonus_constant;
    IndexFunction index = [&](const Eigen::VectorXd& x, Eigen::VectorXd* gradient) {
      IndexGradient ig = index_gradient(state_, s, c, x);
      if (gradient) *gradient = std::move(ig.gradient);
      return ig.value;
    };
    best = maximize_ucb(set, index, ascent_options(), rng_);
  } else {
    IndexFunction index = [&](const Eigen::VectorXd& x, Eigen::VectorXd*) {
      return ucb_index(x, smooth);
    };
    best = maximize_ucb(set, index, ascent_options(), rng_);
  }
  selection.action = std::move(best.point);
  selection.report = best.report;
  selection.converged = best.report.converged;
  annotate(selection, smooth);
  return selection;
}

Selection Policy::select_oful(const ActionSet& set) {
  const double radius = oful_radius();
  const Eigen::VectorXd& estimate = state_.estimate();
  IndexFunction index = [&](const Eigen::VectorXd& x, Eigen::VectorXd* gradient) {
    const Eigen::VectorXd scaled = state_.solve(x);
    const double quad = x.dot(scaled);
    const double omega = quad > 0.0 ? std::sqrt(quad) : 0.0;
    if (gradient) {
      *gradient = estimate;
      if (omega > 0.0) *gradient += (radius / omega) * scaled;
    }
    return x.dot(estimate) + radius * omega;
  };
  Maximizer best = maximize_ucb(set, index, ascent_options(), rng_);
  Selection selection;
  selection.action = std::move(best.point);
  selection.report = best.report;
  selection.converged = best.report.converged;
  annotate(selection, false);
  return selection;
}

Selection Policy::select_greedy(const ActionSet& set) const {
  Maximizer best = maximize_linear(set, state_.estimate());
  Selection selection;
  selection.action = std::move(best.point);
  selection.report = best.report;
  selection.converged = best.report.converged;
  annotate(selection, false);
  return selection;
}

Selection Policy::select_random(const ActionSet& set) {
  Selection selection;
  if (set.kind() == SetKind::kFinite) {
    std::uniform_int_distribution<std::size_t> pick(0, set.points().size() - 1);
    selection.action = set.points()[pick(rng_)];
  } else {
    selection.action = project(set, uniform_sphere(dim(), rng_));
  }
  selection.report.converged = true;
  annotate(selection, false);
  return selection;
}

void Policy::observe(const Eigen::Ref<const Eigen::VectorXd>& action, double reward) {
  check_action(action);
  state_.update(action, reward);
}

}  // namespace linbandit
