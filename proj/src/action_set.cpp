#include "linbandit/action_set.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>

#include <Eigen/Cholesky>

namespace linbandit {

ActionSet ActionSet::finite(std::vector<Eigen::VectorXd> points) {
  if (points.empty()) {
    throw std::invalid_argument("ActionSet::finite: empty action set");
  }
  const Eigen::Index dim = points.front().size();
  if (dim < 1) {
    throw std::invalid_argument("ActionSet::finite: zero-dimensional action");
  }
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (points[i].size() != dim) {
      throw std::invalid_argument("ActionSet::finite: member " + std::to_string(i) +
                                  " has the wrong dimension");
    }
    if (!points[i].allFinite() || points[i].norm() > 1.0 + kNormTolerance) {
      throw std::invalid_argument("ActionSet::finite: member " + std::to_string(i) +
                                  " lies outside the unit ball");
    }
  }
  ActionSet set;
  set.kind_ = SetKind::kFinite;
  set.dim_ = dim;
  set.points_ = std::move(points);
  set.interior_ = set.points_.front();
  return set;
}

ActionSet ActionSet::unit_ball(Eigen::Index dim) {
  if (dim < 1) {
    throw std::invalid_argument("ActionSet::unit_ball: dimension must be positive");
  }
  ActionSet set;
  set.kind_ = SetKind::kUnitBall;
  set.dim_ = dim;
  set.interior_ = Eigen::VectorXd::Zero(dim);
  return set;
}

ActionSet ActionSet::clipped_ball(std::vector<Halfspace> constraints, Eigen::VectorXd interior) {
  const Eigen::Index dim = interior.size();
  if (dim < 1) {
    throw std::invalid_argument("ActionSet::clipped_ball: dimension must be positive");
  }
  if (!interior.allFinite() || interior.norm() >= 1.0) {
    throw std::invalid_argument("ActionSet::clipped_ball: interior point must lie in the open ball");
  }
  for (std::size_t i = 0; i < constraints.size(); ++i) {
    const Halfspace& h = constraints[i];
    if (h.normal.size() != dim || !h.normal.allFinite() || !std::isfinite(h.offset)) {
      throw std::invalid_argument("ActionSet::clipped_ball: malformed constraint " +
                                  std::to_string(i));
    }
    if (h.normal.norm() == 0.0) {
      throw std::invalid_argument("ActionSet::clipped_ball: constraint " + std::to_string(i) +
                                  " has a zero normal");
    }
    if (!(h.normal.dot(interior) < h.offset)) {
      throw std::invalid_argument("ActionSet::clipped_ball: interior point violates constraint " +
                                  std::to_string(i));
    }
  }
  ActionSet set;
  set.kind_ = SetKind::kClippedBall;
  set.dim_ = dim;
  set.constraints_ = std::move(constraints);
  set.interior_ = std::move(interior);
  return set;
}

bool ActionSet::contains(const Eigen::Ref<const Eigen::VectorXd>& x, double tol) const {
  if (x.size() != dim_ || !x.allFinite()) return false;
  switch (kind_) {
    case SetKind::kFinite:
      return std::any_of(points_.begin(), points_.end(),
                         [&](const Eigen::VectorXd& p) { return (p - x).norm() <= tol; });
    case SetKind::kUnitBall:
      return x.norm() <= 1.0 + tol;
    case SetKind::kClippedBall:
      if (x.norm() > 1.0 + tol) return false;
      return std::all_of(constraints_.begin(), constraints_.end(),
                         [&](const Halfspace& h) { return h.normal.dot(x) <= h.offset + tol; });
  }
  return false;
}

namespace {

Eigen::VectorXd project_ball(const Eigen::Ref<const Eigen::VectorXd>& p) {
  const double norm = p.norm();
  if (norm <= 1.0) return p;
  return p / norm;
}

double max_violation(const std::vector<Halfspace>& constraints, const Eigen::VectorXd& x) {
  double worst = -std::numeric_limits<double>::infinity();
  for (const Halfspace& h : constraints) {
    worst = std::max(worst, (h.normal.dot(x) - h.offset) / h.normal.norm());
  }
  return worst;
}

// Projection onto {x : <a_i, x> <= b_i} by a primal active-set method. With an
// identity Hessian each equality subproblem is a projection onto the null
// space of the working rows, so the iterate is exact up to rounding.
struct PolyhedralProjection {
  Eigen::VectorXd point;
  std::vector<std::size_t> working;
};

// Orthogonal decomposition with respect to the working rows: returns
// (lambda, g - A_W^T lambda) where lambda solves A_W A_W^T lambda = A_W g.
std::pair<Eigen::VectorXd, Eigen::VectorXd> split(const std::vector<Halfspace>& constraints,
                                                  const std::vector<std::size_t>& working,
                                                  const Eigen::VectorXd& g) {
  if (working.empty()) return {Eigen::VectorXd(), g};
  const auto k = static_cast<Eigen::Index>(working.size());
  Eigen::MatrixXd rows(k, g.size());
  for (Eigen::Index i = 0; i < k; ++i) rows.row(i) = constraints[working[i]].normal.transpose();
  const Eigen::VectorXd lambda = (rows * rows.transpose()).ldlt().solve(rows * g);
  return {lambda, g - rows.transpose() * lambda};
}

PolyhedralProjection project_active_set(const std::vector<Halfspace>& constraints,
                                        const Eigen::VectorXd& target,
                                        const Eigen::VectorXd& feasible) {
  PolyhedralProjection out{feasible, {}};
  if (max_violation(constraints, target) <= 0.0) return {target, {}};
  Eigen::VectorXd& x = out.point;
  std::vector<std::size_t>& working = out.working;
  const double scale = std::max(1.0, target.norm());
  const std::size_t limit = 50 * (constraints.size() + static_cast<std::size_t>(target.size())) + 100;
  for (std::size_t iter = 0; iter < limit; ++iter) {
    auto [lambda, step] = split(constraints, working, target - x);
    if (step.norm() <= 1e-14 * scale) {
      if (working.empty()) break;
      Eigen::Index drop = 0;
      if (lambda.minCoeff(&drop) >= -1e-14 * scale) break;
      working.erase(working.begin() + drop);
      continue;
    }
    double length = 1.0;
    std::ptrdiff_t blocking = -1;
    const double step_norm = step.norm();
    for (std::size_t i = 0; i < constraints.size(); ++i) {
      if (std::find(working.begin(), working.end(), i) != working.end()) continue;
      const Halfspace& h = constraints[i];
      const double rate = h.normal.dot(step);
      if (rate <= 1e-12 * h.normal.norm() * step_norm) continue;
      const double room = std::max(0.0, h.offset - h.normal.dot(x));
      if (room / rate < length) {
        length = room / rate;
        blocking = static_cast<std::ptrdiff_t>(i);
      }
    }
    x += length * step;
    if (blocking >= 0) working.push_back(static_cast<std::size_t>(blocking));
  }
  return out;
}

// Finds the largest t in (0, t_max] with |proj_P(t v)| <= 1. |proj_P(t v)| is
// nondecreasing in t. On a fixed working set proj_P(t v) = t N v + r with
// N v and r orthogonal, so the crossing has a closed form; it is used as the
// next trial whenever it falls inside the current bracket.
struct RadialRoot {
  Eigen::VectorXd point;
  double t = 0.0;
  long evaluations = 0;
};

// When `gap_target` > 0 the search also stops once (1 - |x|^2) / (2 t) drops
// below it, which is the duality gap of the linear maximization.
RadialRoot radial_root(const std::vector<Halfspace>& constraints, const Eigen::VectorXd& v,
                       const Eigen::VectorXd& feasible, double t_max, double gap_target = 0.0) {
  RadialRoot out;
  auto eval = [&](double t) {
    ++out.evaluations;
    return project_active_set(constraints, t * v, feasible);
  };
  auto predict = [&](const PolyhedralProjection& p, double t) {
    const Eigen::VectorXd free = split(constraints, p.working, v).second;
    const Eigen::VectorXd fixed = p.point - t * free;
    const double room = 1.0 - fixed.squaredNorm();
    const double speed = free.squaredNorm();
    if (room <= 0.0 || speed <= 0.0) return std::numeric_limits<double>::quiet_NaN();
    return std::sqrt(room / speed);
  };

  double lo = 0.0;
  double hi = std::numeric_limits<double>::infinity();
  PolyhedralProjection at_lo{feasible, {}};
  bool have_lo = false;
  double t = std::isfinite(t_max) ? t_max : 1.0;
  for (int k = 0; k < 300; ++k) {
    PolyhedralProjection p = eval(t);
    const double norm2 = p.point.squaredNorm();
    if (norm2 <= 1.0) {
      lo = t;
      at_lo = p;
      have_lo = true;
      if (t >= t_max || 1.0 - norm2 <= 1e-15) break;
      if (gap_target > 0.0 && 0.5 * (1.0 - norm2) / t <= gap_target) break;
    } else {
      hi = t;
    }
    if (std::isfinite(hi) && hi - lo <= 1e-15 * hi) break;
    double next = predict(p, t);
    if (std::isfinite(hi)) {
      if (!(next > lo && next < hi)) next = lo > 0.0 ? std::sqrt(lo * hi) : 0.5 * hi;
    } else {
      // Not yet bracketed: grow geometrically, at most 1e4 per step.
      next = (next > t) ? std::min(next, 1e4 * t) : 1e4 * t;
      next = std::min(next, t_max);
    }
    t = next;
  }
  out.point = have_lo ? at_lo.point : feasible;
  out.t = lo;
  return out;
}

}  // namespace

Eigen::VectorXd project_polyhedron(const std::vector<Halfspace>& constraints,
                                   const Eigen::Ref<const Eigen::VectorXd>& point,
                                   const Eigen::Ref<const Eigen::VectorXd>& feasible) {
  return project_active_set(constraints, point, feasible).point;
}

Eigen::VectorXd project(const ActionSet& set, const Eigen::Ref<const Eigen::VectorXd>& point) {
  if (point.size() != set.dim()) {
    throw std::invalid_argument("project: dimension mismatch");
  }
  switch (set.kind()) {
    case SetKind::kFinite:
      throw std::invalid_argument("project: finite action sets are not convex");
    case SetKind::kUnitBall:
      return project_ball(point);
    case SetKind::kClippedBall: {
      const auto& constraints = set.constraints();
      if (point.norm() <= 1.0 && max_violation(constraints, point) <= 0.0) return point;
      const Eigen::VectorXd radial = project_ball(point);
      if (max_violation(constraints, radial) <= 0.0) return radial;
      // proj onto P and the ball is proj_P(t p) for the ball multiplier t = 1/(1 + mu).
      return radial_root(constraints, point, set.interior_point(), 1.0).point;
    }
  }
  return point;
}

namespace {

Maximizer maximize_linear_clipped(const ActionSet& set, const Eigen::VectorXd& direction) {
  constexpr double kGapTolerance = 1e-10;
  const double magnitude = direction.norm();

  Maximizer out;
  const Eigen::VectorXd radial = direction / magnitude;
  if (max_violation(set.constraints(), radial) <= 0.0) {
    out.point = radial;
    out.value = magnitude;
    out.report = {0, magnitude, 0.0, true};
    return out;
  }

  // Dualize the ball: x(nu) = proj_P(direction / nu), gap nu/2 (1 - |x|^2).
  const RadialRoot root = radial_root(set.constraints(), direction, set.interior_point(),
                                      std::numeric_limits<double>::infinity(),
                                      0.01 * kGapTolerance);
  const double gap = root.t > 0.0 ? std::max(0.0, 0.5 / root.t * (1.0 - root.point.squaredNorm()))
                                  : std::numeric_limits<double>::infinity();
  out.value = direction.dot(root.point);
  out.point = root.point;
  out.report = {root.evaluations, out.value, gap, gap <= kGapTolerance};
  return out;
}

}  // namespace

Maximizer maximize_linear(const ActionSet& set, const Eigen::Ref<const Eigen::VectorXd>& direction) {
  if (direction.size() != set.dim()) {
    throw std::invalid_argument("maximize_linear: dimension mismatch");
  }
  Maximizer out;
  switch (set.kind()) {
    case SetKind::kFinite: {
      const auto& points = set.points();
      std::size_t arg = 0;
      double best = points[0].dot(direction);
      for (std::size_t i = 1; i < points.size(); ++i) {
        const double v = points[i].dot(direction);
        if (v > best) {
          best = v;
          arg = i;
        }
      }
      out.point = points[arg];
      out.value = best;
      out.member = static_cast<std::ptrdiff_t>(arg);
      out.report = {static_cast<long>(points.size()), best, 0.0, true};
      return out;
    }
    case SetKind::kUnitBall:
    case SetKind::kClippedBall: {
      const double magnitude = direction.norm();
      if (magnitude == 0.0) {
        out.point = set.interior_point();
        out.value = 0.0;
        out.report = {0, 0.0, 0.0, true};
        return out;
      }
      if (set.kind() == SetKind::kClippedBall) {
        return maximize_linear_clipped(set, Eigen::VectorXd(direction));
      }
      out.point = direction / magnitude;
      out.value = magnitude;
      out.report = {0, magnitude, 0.0, true};
      return out;
    }
  }
  return out;
}

namespace {

struct AscentRun {
  Eigen::VectorXd point;
  double value = -std::numeric_limits<double>::infinity();
  double certificate = std::numeric_limits<double>::infinity();
  long iterations = 0;
  bool converged = false;
};

AscentRun ascend(const ActionSet& set, const IndexFunction& index, const AscentOptions& options,
                 const Eigen::VectorXd& start) {
  AscentRun run;
  Eigen::VectorXd x = project(set, start);
  Eigen::VectorXd g(x.size());
  double f = index(x, &g);
  double step = 1.0;
  const double diameter = set.diameter_bound();

  Eigen::VectorXd g_next(x.size());
  for (; run.iterations < options.max_iterations; ++run.iterations) {
    run.certificate = (project(set, x + g) - x).norm() * diameter;
    if (run.certificate <= options.slack) {
      run.converged = true;
      break;
    }
    bool accepted = false;
    Eigen::VectorXd candidate;
    double f_next = 0.0;
    while (step > 1e-20) {
      candidate = project(set, x + step * g);
      f_next = index(candidate, &g_next);
      const double predicted = g.dot(candidate - x);
      if (f_next >= f + options.armijo * predicted) {
        accepted = true;
        break;
      }
      step *= options.backtrack;
    }
    if (!accepted) break;
    x = std::move(candidate);
    f = f_next;
    g.swap(g_next);
    step = std::min(step * 2.0, 1e6);
  }
  run.point = std::move(x);
  run.value = f;
  return run;
}

}  // namespace

Maximizer maximize_ucb(const ActionSet& set, const IndexFunction& index,
                       const AscentOptions& options, Rng& rng) {
  Maximizer out;
  if (set.kind() == SetKind::kFinite) {
    const auto& points = set.points();
    std::size_t arg = 0;
    double best = index(points[0], nullptr);
    for (std::size_t i = 1; i < points.size(); ++i) {
      const double v = index(points[i], nullptr);
      if (v > best) {
        best = v;
        arg = i;
      }
    }
    out.point = points[arg];
    out.value = best;
    out.member = static_cast<std::ptrdiff_t>(arg);
    out.report = {static_cast<long>(points.size()), best, 0.0, true};
    return out;
  }
  if (!(options.slack > 0.0)) {
    throw std::invalid_argument("maximize_ucb: slack must be positive");
  }

  std::vector<Eigen::VectorXd> starts;
  starts.push_back(set.interior_point());
  for (const auto& hint : options.hints) {
    if (hint.size() == set.dim() && hint.allFinite()) starts.push_back(hint);
  }
  for (int r = 0; r < options.restarts; ++r) {
    starts.push_back(uniform_ball(set.dim(), rng));
  }

  AscentRun best;
  long iterations = 0;
  for (const auto& start : starts) {
    AscentRun run = ascend(set, index, options, start);
    iterations += run.iterations;
    if (run.value > best.value) best = std::move(run);
  }
  out.point = std::move(best.point);
  out.value = best.value;
  out.report = {iterations, best.value, best.certificate, best.converged};
  return out;
}

IndexGradient index_gradient(const RidgeState& state, const ConfidenceSchedule& schedule,
                             double bonus_constant, const Eigen::Ref<const Eigen::VectorXd>& x) {
  if (x.size() != state.dim()) {
    throw std::invalid_argument("index_gradient: dimension mismatch");
  }
  IndexGradient out;
  const Eigen::VectorXd& estimate = state.estimate();
  const Eigen::VectorXd scaled = state.solve(x);
  const double quad = x.dot(scaled);
  if (!std::isfinite(quad)) {
    throw std::runtime_error("index_gradient: non-finite width");
  }
  out.value = x.dot(estimate);
  out.gradient = estimate;
  if (quad <= 0.0) return out;

  const double omega = std::sqrt(quad);
  const double root_d = std::sqrt(static_cast<double>(state.dim()));
  const double level = alpha_smooth(schedule, omega);
  const double slope = root_d + level + alpha_smooth_elasticity(schedule, omega);
  out.omega = omega;
  out.alpha = level;
  out.value += bonus_constant * (root_d + level) * omega;
  out.gradient += (bonus_constant * slope / omega) * scaled;
  if (!std::isfinite(out.value) || !out.gradient.allFinite()) {
    throw std::runtime_error("index_gradient: non-finite result");
  }
  return out;
}

}  // namespace linbandit
