#include "linbandit/estimator.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include <Eigen/Cholesky>

namespace linbandit {

RidgeState::RidgeState(Eigen::Index dim) {
  if (dim < 1) {
    throw std::invalid_argument("RidgeState: dimension must be positive");
  }
  gram_ = Eigen::MatrixXd::Identity(dim, dim);
  gram_inv_ = Eigen::MatrixXd::Identity(dim, dim);
  moment_ = Eigen::VectorXd::Zero(dim);
  estimate_ = Eigen::VectorXd::Zero(dim);
}

void RidgeState::check_dim(const Eigen::Ref<const Eigen::VectorXd>& x, const char* what) const {
  if (x.size() != dim()) {
    throw std::invalid_argument(std::string("RidgeState::") + what + ": expected dimension " +
                                std::to_string(dim()) + ", got " + std::to_string(x.size()));
  }
}

void RidgeState::update(const Eigen::Ref<const Eigen::VectorXd>& action, double reward) {
  check_dim(action, "update");
  if (!action.allFinite() || !std::isfinite(reward)) {
    throw std::invalid_argument("RidgeState::update: non-finite action or reward");
  }
  if (action.norm() > 1.0 + kNormTolerance) {
    throw std::invalid_argument("RidgeState::update: action outside the unit ball");
  }

  const Eigen::VectorXd u = gram_inv_ * action;
  const double quad = std::max(0.0, action.dot(u));

  // Residual of the solve along the update direction, checked before gram moves.
  const double residual = (gram_ * u - action).cwiseAbs().maxCoeff();

  gram_.noalias() += action * action.transpose();
  moment_.noalias() += reward * action;
  gram_inv_.noalias() -= (u * u.transpose()) / (1.0 + quad);
  log_det_ += std::log1p(quad);
  ++rounds_;
  ++since_refactor_;

  if (since_refactor_ >= kRefactorInterval || residual > kInverseTolerance) {
    refactorize();
  } else {
    estimate_.noalias() = gram_inv_ * moment_;
  }
}

double RidgeState::width(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  check_dim(x, "width");
  const double quad = x.dot(gram_inv_ * x);
  if (!std::isfinite(quad) || quad < -1e-12) {
    throw std::runtime_error("RidgeState::width: negative quadratic form, inverse is corrupted");
  }
  return quad <= 0.0 ? 0.0 : std::sqrt(quad);
}

Eigen::VectorXd RidgeState::solve(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  check_dim(x, "solve");
  return gram_inv_ * x;
}

double RidgeState::log_det_factored() const {
  Eigen::LLT<Eigen::MatrixXd> llt(gram_);
  if (llt.info() != Eigen::Success) {
    throw std::runtime_error("RidgeState: gram matrix is not positive definite");
  }
  return 2.0 * llt.matrixLLT().diagonal().array().log().sum();
}

double RidgeState::inverse_deviation() const {
  const Eigen::Index d = dim();
  return (gram_ * gram_inv_ - Eigen::MatrixXd::Identity(d, d)).cwiseAbs().maxCoeff();
}

void RidgeState::refactorize() {
  Eigen::LLT<Eigen::MatrixXd> llt(gram_);
  if (llt.info() != Eigen::Success) {
    throw std::runtime_error("RidgeState: gram matrix is not positive definite");
  }
  const Eigen::Index d = dim();
  gram_inv_ = llt.solve(Eigen::MatrixXd::Identity(d, d));
  gram_inv_ = 0.5 * (gram_inv_ + gram_inv_.transpose()).eval();
  estimate_ = llt.solve(moment_);
  log_det_ = 2.0 * llt.matrixLLT().diagonal().array().log().sum();
  since_refactor_ = 0;
  ++refactorizations_;
}

void ConfidenceSchedule::validate() const {
  if (horizon < 2) {
    throw std::invalid_argument("ConfidenceSchedule: horizon must be at least 2");
  }
  if (dim < 1) {
    throw std::invalid_argument("ConfidenceSchedule: dimension must be positive");
  }
}

double ConfidenceSchedule::scale() const {
  const double t = static_cast<double>(horizon);
  return t * std::log(t) / static_cast<double>(dim);
}

namespace {

void check_omega(double omega) {
  if (!(omega > 0.0) || !std::isfinite(omega)) {
    throw std::invalid_argument("alpha: width must be positive and finite, got " +
                                std::to_string(omega));
  }
}

}  // namespace

double alpha_max_form(const ConfidenceSchedule& schedule, double omega) {
  check_omega(omega);
  const double level = std::log(schedule.scale()) + 2.0 * std::log(omega);
  return std::sqrt(std::max(1.0, level));
}

double alpha_smooth(const ConfidenceSchedule& schedule, double omega) {
  check_omega(omega);
  const double inner = std::max(0.0, std::log(schedule.scale()) + 2.0 * std::log(omega));
  return std::sqrt(std::log(std::numbers::e + inner));
}

double alpha_smooth_elasticity(const ConfidenceSchedule& schedule, double omega) {
  check_omega(omega);
  const double inner = std::log(schedule.scale()) + 2.0 * std::log(omega);
  if (inner < 0.0) return 0.0;
  const double level = std::sqrt(std::log(std::numbers::e + inner));
  return 1.0 / (level * (std::numbers::e + inner));
}

double alpha(const ConfidenceSchedule& schedule, double omega) {
  return schedule.smooth ? alpha_smooth(schedule, omega) : alpha_max_form(schedule, omega);
}

}  // namespace linbandit
