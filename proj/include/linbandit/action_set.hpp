#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include <Eigen/Core>

#include "linbandit/estimator.hpp"
#include "linbandit/random.hpp"

namespace linbandit {

/// { x : <normal, x> <= offset }
struct Halfspace {
  Eigen::VectorXd normal;
  double offset = 0.0;
};

enum class SetKind { kFinite, kUnitBall, kClippedBall };

/// A per-round action set inside the unit ball: a finite list of points, the
/// ball itself, or the ball cut by halfspaces.
class ActionSet {
 public:
  static constexpr double kNormTolerance = 1e-12;

  /// Throws if `points` is empty, ragged, or has a member outside the ball.
  static ActionSet finite(std::vector<Eigen::VectorXd> points);
  static ActionSet unit_ball(Eigen::Index dim);
  /// `interior` must satisfy every constraint strictly and lie in the open
  /// unit ball; it certifies the set is nonempty.
  static ActionSet clipped_ball(std::vector<Halfspace> constraints, Eigen::VectorXd interior);

  SetKind kind() const { return kind_; }
  Eigen::Index dim() const { return dim_; }
  bool is_convex() const { return kind_ != SetKind::kFinite; }

  const std::vector<Eigen::VectorXd>& points() const { return points_; }
  const std::vector<Halfspace>& constraints() const { return constraints_; }
  const Eigen::VectorXd& interior_point() const { return interior_; }

  /// Membership up to `tol` on every constraint (and on the finite list, up
  /// to `tol` in Euclidean distance to some member).
  bool contains(const Eigen::Ref<const Eigen::VectorXd>& x, double tol) const;

  double diameter_bound() const { return 2.0; }

 private:
  ActionSet() = default;

  SetKind kind_ = SetKind::kUnitBall;
  Eigen::Index dim_ = 0;
  std::vector<Eigen::VectorXd> points_;
  std::vector<Halfspace> constraints_;
  Eigen::VectorXd interior_;
};

struct ConvexOptReport {
  long iterations = 0;
  double objective = 0.0;
  /// Upper bound on (supremum - objective) when `converged`.
  double slack_bound = 0.0;
  bool converged = false;
};

struct Maximizer {
  Eigen::VectorXd point;
  double value = 0.0;
  ConvexOptReport report;
  /// Position in the finite list, when the set is finite.
  std::ptrdiff_t member = -1;
};

/// Euclidean projection onto a convex set. The ball is a radial shrink. On
/// the clipped ball the ball constraint carries a scalar multiplier: the
/// projection equals the polyhedral projection of t * point for the largest
/// t in (0, 1] that lands in the ball, and t is located by a bracketed search.
/// Throws std::invalid_argument on a finite set.
Eigen::VectorXd project(const ActionSet& set, const Eigen::Ref<const Eigen::VectorXd>& point);

/// Euclidean projection onto the polyhedron of `constraints` alone (no ball),
/// by a primal active-set method started at the feasible point `feasible`.
Eigen::VectorXd project_polyhedron(const std::vector<Halfspace>& constraints,
                                   const Eigen::Ref<const Eigen::VectorXd>& point,
                                   const Eigen::Ref<const Eigen::VectorXd>& feasible);

/// sup_{x in set} <x, direction>. Exact scans for finite sets and the ball.
/// On the clipped ball the ball constraint is dualized: x(nu) is the
/// projection of direction/nu onto the polyhedron and nu is searched until
/// the duality gap nu/2 (1 - |x(nu)|^2) is below 1e-10; the gap is reported
/// as the slack bound. A zero direction returns the interior point.
Maximizer maximize_linear(const ActionSet& set, const Eigen::Ref<const Eigen::VectorXd>& direction);

/// Objective for maximize_ucb: returns the value at x and, when `gradient`
/// is non-null, writes a (sub)gradient there.
using IndexFunction = std::function<double(const Eigen::VectorXd& x, Eigen::VectorXd* gradient)>;

struct AscentOptions {
  double slack = 1e-6;
  int restarts = 3;
  long max_iterations = 10000;
  double armijo = 1e-4;
  double backtrack = 0.5;
  /// Extra starting points tried before the random restarts.
  std::vector<Eigen::VectorXd> hints;
};

/// Finite sets: exhaustive scan, lowest index wins ties, slack 0.
/// Convex sets: projected gradient ascent with backtracking from the interior
/// point, each hint, and `restarts` random points. A run stops once
/// |P(x + g) - x| * diameter drops below `slack`. The best iterate over all
/// runs is returned; `converged` is false if that run hit the iteration cap.
Maximizer maximize_ucb(const ActionSet& set, const IndexFunction& index,
                       const AscentOptions& options, Rng& rng);

struct IndexGradient {
  double value = 0.0;
  Eigen::VectorXd gradient;
  double omega = 0.0;
  double alpha = 0.0;
};

/// Smoothed optimistic index <x, estimate> + C (sqrt(d) + alpha_smooth(w)) w
/// with w = width(x), and its gradient
///   estimate + C (sqrt(d) + alpha_smooth(w) + w alpha_smooth'(w)) gram^{-1} x / w.
/// At w = 0 the bonus vanishes and the gradient is the estimate.
IndexGradient index_gradient(const RidgeState& state, const ConfidenceSchedule& schedule,
                             double bonus_constant, const Eigen::Ref<const Eigen::VectorXd>& x);

}  // namespace linbandit
