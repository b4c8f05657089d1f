#pragma once

#include <cstdint>

#include <Eigen/Core>

namespace linbandit {

/*
Online ridge regression with identity regularizer.

  gram     = I + sum_s x_s x_s^T
  moment   = sum_s r_s x_s
  estimate = gram^{-1} moment

The inverse is carried along with Sherman-Morrison rank-one updates and
rebuilt from a Cholesky factorization every kRefactorInterval updates, or
earlier when the residual of the update direction drifts past
kInverseTolerance. ln det(gram) is accumulated as sum ln(1 + width^2).
*/
class RidgeState {
 public:
  static constexpr std::int64_t kRefactorInterval = 512;
  static constexpr double kInverseTolerance = 1e-8;
  static constexpr double kNormTolerance = 1e-12;

  explicit RidgeState(Eigen::Index dim);

  Eigen::Index dim() const { return gram_.rows(); }
  /// Number of updates applied.
  std::int64_t rounds() const { return rounds_; }

  const Eigen::MatrixXd& gram() const { return gram_; }
  const Eigen::MatrixXd& gram_inv() const { return gram_inv_; }
  const Eigen::VectorXd& moment() const { return moment_; }
  const Eigen::VectorXd& estimate() const { return estimate_; }

  /// Adds one (action, reward) observation. The action must lie in the unit
  /// ball (up to kNormTolerance) and have finite entries.
  void update(const Eigen::Ref<const Eigen::VectorXd>& action, double reward);

  /// sqrt(x^T gram^{-1} x). Tiny negative quadratic forms clamp to 0; anything
  /// below -1e-12 means gram_inv is corrupted and throws.
  double width(const Eigen::Ref<const Eigen::VectorXd>& x) const;

  /// gram^{-1} x
  Eigen::VectorXd solve(const Eigen::Ref<const Eigen::VectorXd>& x) const;

  /// Incrementally maintained ln det(gram).
  double log_det() const { return log_det_; }
  /// ln det(gram) from a fresh Cholesky factorization; throws if gram is not
  /// positive definite.
  double log_det_factored() const;

  /// max_ij |(gram * gram_inv - I)_ij|
  double inverse_deviation() const;

  /// Rebuilds gram_inv, estimate and log_det from gram.
  void refactorize();

  std::int64_t refactorizations() const { return refactorizations_; }

 private:
  void check_dim(const Eigen::Ref<const Eigen::VectorXd>& x, const char* what) const;

  Eigen::MatrixXd gram_;
  Eigen::MatrixXd gram_inv_;
  Eigen::VectorXd moment_;
  Eigen::VectorXd estimate_;
  double log_det_ = 0.0;
  std::int64_t rounds_ = 0;
  std::int64_t since_refactor_ = 0;
  std::int64_t refactorizations_ = 0;
};

/// Horizon and dimension as they enter the confidence level, plus the choice
/// between the max-form level and its smoothed counterpart.
struct ConfidenceSchedule {
  std::int64_t horizon = 2;
  std::int64_t dim = 1;
  bool smooth = false;

  /// Throws std::invalid_argument unless horizon >= 2 and dim >= 1.
  void validate() const;
  /// (T ln T) / d, the scale multiplying width^2 inside the level.
  double scale() const;
};

/// sqrt(max{1, ln(scale * omega^2)})
double alpha_max_form(const ConfidenceSchedule& schedule, double omega);

/// sqrt(ln(e + ln_+(scale * omega^2))) with ln_+(z) = max{0, ln z}.
double alpha_smooth(const ConfidenceSchedule& schedule, double omega);

/// omega * d(alpha_smooth)/d(omega). Zero wherever the ln_+ clamp is active;
/// on the clamp boundary the right derivative is returned.
double alpha_smooth_elasticity(const ConfidenceSchedule& schedule, double omega);

/// Dispatches on schedule.smooth. Throws for omega <= 0 or non-finite omega.
double alpha(const ConfidenceSchedule& schedule, double omega);

}  // namespace linbandit
