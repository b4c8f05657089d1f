#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include <Eigen/Dense>
#include <gtest/gtest.h>

#include "linbandit/environment.hpp"
#include "linbandit/policy.hpp"

namespace linbandit {
namespace {

PolicyConfig vcl_config(std::int64_t horizon, std::int64_t dim, double c = 1.0,
                        bool smooth = false) {
  PolicyConfig config;
  config.kind = PolicyKind::kVclUcb;
  config.bonus_constant = c;
  config.schedule = ConfidenceSchedule{horizon, dim, smooth};
  return config;
}

PolicyConfig with_kind(PolicyKind kind, std::int64_t horizon, std::int64_t dim) {
  PolicyConfig config = vcl_config(horizon, dim);
  config.kind = kind;
  return config;
}

// Independent scalar recomputation of the fresh-state index.
double fresh_index(double horizon, double d, double c, double w) {
  const double level = std::sqrt(std::max(1.0, std::log(horizon * std::log(horizon) * w * w / d)));
  return c * (std::sqrt(d) + level) * w;
}

TEST(PolicyConfig, Validation) {
  PolicyConfig config = vcl_config(100, 2);
  EXPECT_NO_THROW(config.validate());
  EXPECT_DOUBLE_EQ(config.slack(), 0.1);
  config.bonus_constant = 0.0;
  EXPECT_THROW(config.validate(), std::invalid_argument);
  config = vcl_config(100, 2);
  config.oful_delta = 1.0;
  EXPECT_THROW(config.validate(), std::invalid_argument);
  config = vcl_config(100, 2);
  config.argmax_slack = -1e-3;
  EXPECT_THROW(config.validate(), std::invalid_argument);
  EXPECT_THROW(Policy(vcl_config(100, 3), 2, 1), std::invalid_argument);
}

TEST(PolicyKind, RoundTrip) {
  for (PolicyKind k : {PolicyKind::kVclUcb, PolicyKind::kOful, PolicyKind::kGreedy,
                       PolicyKind::kRandom}) {
    EXPECT_EQ(parse_policy_kind(to_string(k)), k);
  }
  EXPECT_FALSE(parse_policy_kind("thompson").has_value());
}

TEST(UcbIndex, FreshStateUnitWidthBracketsRealHorizon) {
  // The closed form at T = e^e is (sqrt(d) + sqrt(max{1, e + 1 - ln d})).
  // Horizons are integral, so bracket it between T = 15 and T = 16.
  const double expected[] = {2.9282846855, 3.1535049836, 3.3505901305};
  for (std::int64_t d = 1; d <= 3; ++d) {
    const double te = std::exp(std::numbers::e);
    const double closed = std::sqrt(static_cast<double>(d)) +
                          std::sqrt(std::max(1.0, std::numbers::e + 1.0 - std::log(double(d))));
    EXPECT_NEAR(closed, expected[d - 1], 1e-10);
    EXPECT_NEAR(fresh_index(te, double(d), 1.0, 1.0), closed, 1e-12);

    Eigen::VectorXd x = Eigen::VectorXd::Zero(d);
    x[0] = 1.0;
    const Policy low(vcl_config(15, d), d, 0);
    const Policy high(vcl_config(16, d), d, 0);
    EXPECT_NEAR(low.ucb_index(x), fresh_index(15.0, double(d), 1.0, 1.0), 1e-12);
    EXPECT_LE(low.ucb_index(x), closed);
    EXPECT_GE(high.ucb_index(x), closed);
  }
}

TEST(UcbIndex, ZeroActionAtFreshState) {
  const Policy p(vcl_config(1000, 3), 3, 0);
  EXPECT_EQ(p.ucb_index(Eigen::VectorXd::Zero(3)), 0.0);
}

TEST(UcbIndex, HalfWidthInTwoDimensions) {
  const Policy p(vcl_config(1024, 2), 2, 0);
  const Eigen::Vector2d x(0.5, 0.0);
  const double level = std::sqrt(std::log(1024.0 * std::log(1024.0) * 0.25 / 2.0));
  EXPECT_NEAR(level, 2.6053987096665260, 1e-13);
  const double oracle = (std::sqrt(2.0) + level) * 0.5;
  EXPECT_NEAR(p.ucb_index(x), oracle, 1e-13);
  EXPECT_NEAR(p.ucb_index(x), 2.0098061360198105, 1e-13);
}

TEST(UcbIndex, Errors) {
  const Policy p(vcl_config(100, 2), 2, 0);
  EXPECT_THROW(p.ucb_index(Eigen::Vector3d(0.1, 0, 0)), std::invalid_argument);
  const Policy g(with_kind(PolicyKind::kGreedy, 100, 2), 2, 0);
  EXPECT_THROW(g.ucb_index(Eigen::Vector2d(0.1, 0)), std::logic_error);
}

TEST(UcbIndex, ZeroWidthDirectionGetsNoBonus) {
  // omega is exactly zero only for x = 0 under a positive definite gram;
  // the mean alone is returned there even after updates.
  Policy p(vcl_config(100, 2), 2, 0);
  p.observe(Eigen::Vector2d(0.6, 0.8), 1.0);
  EXPECT_EQ(p.ucb_index(Eigen::Vector2d::Zero()), 0.0);
}

TEST(OfulIndex, Examples) {
  PolicyConfig config = with_kind(PolicyKind::kOful, 100, 2);
  config.oful_delta = 0.1;
  const Policy p(config, 2, 0);
  const double beta0 = std::sqrt(2.0 * std::log(10.0)) + 1.0;
  EXPECT_NEAR(p.oful_radius(), beta0, 1e-14);
  EXPECT_NEAR(p.oful_index(Eigen::Vector2d(0.6, 0.8)), beta0, 1e-14);
  EXPECT_NEAR(beta0, 3.1459660262893472, 1e-14);
  EXPECT_EQ(p.oful_index(Eigen::Vector2d::Zero()), 0.0);

  PolicyConfig config4 = with_kind(PolicyKind::kOful, 1000, 4);
  config4.oful_delta = 0.01;
  Policy q(config4, 4, 0);
  for (int t = 0; t < 100; ++t) q.observe(Eigen::Vector4d(0.5, 0.5, 0.5, 0.5), 0.0);
  const double beta = std::sqrt(4.0 * std::log(101.0 / 0.01)) + 1.0;
  EXPECT_NEAR(q.oful_radius(), beta, 1e-13);
  EXPECT_NEAR(beta, 7.0729863173991594, 1e-13);
  EXPECT_THROW(Policy(vcl_config(100, 2), 2, 0).oful_index(Eigen::Vector2d(1, 0)),
               std::logic_error);
}

TEST(Select, FiniteSetPrefersWiderArmAtFreshState) {
  Policy p(vcl_config(100, 2), 2, 0);
  const auto set = ActionSet::finite({Eigen::Vector2d(0, 0.5), Eigen::Vector2d(1, 0)});
  const Selection s = p.select(set);
  EXPECT_EQ(s.action, Eigen::Vector2d(1, 0));
  const auto set2 = ActionSet::finite({Eigen::Vector2d(1, 0), Eigen::Vector2d(0, 0.5)});
  EXPECT_EQ(p.select(set2).action, Eigen::Vector2d(1, 0));
}

TEST(Select, GreedyOnBallAtFreshState) {
  Policy p(with_kind(PolicyKind::kGreedy, 100, 3), 3, 0);
  const Selection s = p.select(ActionSet::unit_ball(3));
  EXPECT_LE(s.action.norm(), 1.0 + 1e-12);
  EXPECT_GE(s.action.dot(p.state().estimate()), 0.0 - p.config().slack());
}

TEST(Select, VclOnBallAtFreshStateReachesSphere) {
  for (std::int64_t d : {2, 3, 5}) {
    const std::int64_t horizon = 1000;
    PolicyConfig config = vcl_config(horizon, d);
    Policy p(config, d, 42);
    const double slack = config.slack();
    const Selection s = p.select(ActionSet::unit_ball(d));
    EXPECT_TRUE(s.converged);
    EXPECT_GE(s.action.norm(), 1.0 - 10.0 * slack);
    // Radial oracle for the smoothed index that the convex path maximizes.
    const ConfidenceSchedule smooth{horizon, d, true};
    double oracle = 0.0;
    for (int i = 1; i <= 100000; ++i) {
      const double r = i / 100000.0;
      oracle = std::max(oracle, (std::sqrt(double(d)) + alpha_smooth(smooth, r)) * r);
    }
    EXPECT_GE(p.ucb_index(s.action, true), oracle - slack);
    EXPECT_LE(p.ucb_index(s.action, true), oracle + 1e-9);
  }
}

TEST(Select, RandomPolicyStaysInSet) {
  Policy p(with_kind(PolicyKind::kRandom, 100, 2), 2, 3);
  const auto set = ActionSet::clipped_ball({Halfspace{Eigen::Vector2d(1, 0), 0.0}},
                                           Eigen::Vector2d(-0.5, 0.0));
  for (int i = 0; i < 200; ++i) EXPECT_TRUE(set.contains(p.select(set).action, 1e-9));
  const auto finite = ActionSet::finite({Eigen::Vector2d(1, 0), Eigen::Vector2d(0, 1)});
  int first = 0;
  for (int i = 0; i < 2000; ++i) first += p.select(finite).action[0] == 1.0;
  EXPECT_NEAR(first / 2000.0, 0.5, 0.05);
}

TEST(Observe, Examples) {
  Policy p(vcl_config(100, 2), 2, 0);
  p.observe(Eigen::Vector2d(1, 0), 1.0);
  EXPECT_NEAR((p.state().estimate() - Eigen::Vector2d(0.5, 0)).norm(), 0.0, 1e-15);
  p.observe(Eigen::Vector2d::Zero(), 0.3);
  EXPECT_NEAR((p.state().estimate() - Eigen::Vector2d(0.5, 0)).norm(), 0.0, 1e-15);
  EXPECT_EQ(p.state().rounds(), 2);
}

TEST(Observe, MatchesBatchRidge) {
  Policy p(vcl_config(1000, 2), 2, 0);
  Rng rng(2718);
  std::normal_distribution<double> noise(0.0, 1.0);
  const Eigen::Vector2d theta(0.6, 0.8);
  Eigen::MatrixXd xs(100, 2);
  Eigen::VectorXd ys(100);
  for (int t = 0; t < 100; ++t) {
    const Eigen::VectorXd x = uniform_sphere(2, rng);
    const double y = x.dot(theta) + noise(rng);
    xs.row(t) = x.transpose();
    ys[t] = y;
    p.observe(x, y);
  }
  const Eigen::MatrixXd gram = Eigen::MatrixXd::Identity(2, 2) + xs.transpose() * xs;
  const Eigen::VectorXd batch = gram.partialPivLu().solve(xs.transpose() * ys);
  EXPECT_LE((p.state().estimate() - batch).norm(), 1e-8);
  EXPECT_LE((batch - theta).norm(), 0.5);
}

TEST(Select, ArgmaxInvariantAcrossConstantsForEqualWidths) {
  // At the fresh state every unit vector has width 1, so the bonus is a
  // constant shift and the argmax must track the mean alone.
  Rng rng(99);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<Eigen::VectorXd> arms;
    for (int k = 0; k < 8; ++k) arms.push_back(uniform_sphere(3, rng));
    const auto set = ActionSet::finite(arms);
    std::vector<Eigen::VectorXd> picks;
    for (double c : {0.5, 1.0, 2.0}) {
      Policy p(vcl_config(500, 3, c), 3, 0);
      picks.push_back(p.select(set).action);
    }
    EXPECT_EQ(picks[0], picks[1]);
    EXPECT_EQ(picks[1], picks[2]);
  }
}

TEST(Select, ArgmaxInvariantWithNonzeroEstimate) {
  // Equal observations along e1 and e2 make the gram isotropic in that plane,
  // so arms (0.8 u, 0.6) with unit u share a width while their means differ.
  Rng rng(7);
  std::uniform_real_distribution<double> rewards(-1.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<Eigen::VectorXd> arms;
    for (int k = 0; k < 6; ++k) {
      const Eigen::VectorXd u = uniform_sphere(2, rng);
      arms.push_back(Eigen::Vector3d(0.8 * u[0], 0.8 * u[1], 0.6));
    }
    const auto set = ActionSet::finite(arms);
    const double r1 = rewards(rng);
    const double r2 = rewards(rng);
    std::vector<std::ptrdiff_t> picks;
    for (double c : {0.5, 1.0, 2.0}) {
      Policy p(vcl_config(500, 3, c), 3, 0);
      p.observe(Eigen::Vector3d(1, 0, 0), r1);
      p.observe(Eigen::Vector3d(0, 1, 0), r2);
      const Eigen::VectorXd x = p.select(set).action;
      for (std::size_t k = 0; k < arms.size(); ++k) {
        if (arms[k] == x) picks.push_back(static_cast<std::ptrdiff_t>(k));
      }
    }
    ASSERT_EQ(picks.size(), 3u);
    EXPECT_EQ(picks[0], picks[1]);
    EXPECT_EQ(picks[1], picks[2]);
    std::size_t greedy = 0;
    for (std::size_t k = 1; k < arms.size(); ++k) {
      if (arms[k].head<2>().dot(Eigen::Vector2d(r1, r2)) >
          arms[greedy].head<2>().dot(Eigen::Vector2d(r1, r2))) {
        greedy = k;
      }
    }
    EXPECT_EQ(picks[0], static_cast<std::ptrdiff_t>(greedy));
  }
}

TEST(UcbIndex, NondecreasingInWidthAtFixedMean) {
  // Synthetic grid: the index is mean + C (sqrt(d) + alpha(w)) w, so sweep w
  // through the closed form composed from the schedule.
  for (bool smooth : {false, true}) {
    const ConfidenceSchedule s{1000, 4, smooth};
    for (double mean : {-1.0, 0.0, 0.7}) {
      double previous = -1e300;
      for (int i = 0; i <= 2000; ++i) {
        const double w = i / 2000.0;
        const double index = w == 0.0 ? mean : mean + (2.0 + alpha(s, w)) * w;
        EXPECT_GE(index, previous - 1e-15);
        previous = index;
      }
    }
  }
  // Through the policy: scale one action so the mean stays fixed while width grows.
  Policy p(vcl_config(1000, 2), 2, 0);
  p.observe(Eigen::Vector2d(1, 0), 0.0);
  p.observe(Eigen::Vector2d(1, 0), 0.0);
  // Estimate is zero, so the mean is fixed at 0 for every x.
  double previous = -1.0;
  for (int i = 0; i <= 100; ++i) {
    const Eigen::Vector2d x(0.6 * i / 100.0, 0.8 * i / 100.0);
    const double v = p.ucb_index(x);
    EXPECT_GE(v, previous);
    previous = v;
  }
}

TEST(Select, FiniteSetMatchesExhaustiveScan) {
  Rng rng(31337);
  std::normal_distribution<double> noise(0.0, 1.0);
  for (int trial = 0; trial < 40; ++trial) {
    const Eigen::Index d = 2 + trial % 4;
    Policy p(vcl_config(300, d, 1.0 + (trial % 3)), d, trial);
    for (int t = 0; t < trial; ++t) p.observe(uniform_ball(d, rng), noise(rng));
    std::vector<Eigen::VectorXd> arms;
    for (int k = 0; k < 12; ++k) arms.push_back(uniform_ball(d, rng));
    arms.push_back(arms[3]);  // duplicate: lowest index must win
    const auto set = ActionSet::finite(arms);
    std::size_t best = 0;
    for (std::size_t k = 1; k < arms.size(); ++k) {
      if (p.ucb_index(arms[k]) > p.ucb_index(arms[best])) best = k;
    }
    const Selection s = p.select(set);
    EXPECT_EQ(s.action, arms[best]);
    EXPECT_EQ(s.report.slack_bound, 0.0);
  }
}

TEST(Select, OptimismFrequency) {
  // Monte-Carlo proxy for the confidence region: with C = 2 and Gaussian
  // noise, the index of the best arm should dominate its mean for the first
  // 100 rounds in at least 95% of episodes. Seeds are fixed, so the outcome
  // is deterministic; the margin guards against platform-level libm drift.
  InstanceSpec spec;
  spec.dim = 3;
  spec.horizon = 100;
  spec.sets.kind = SetGenerator::kFixedFinite;
  spec.sets.count = 10;
  int optimistic = 0;
  const int episodes = 200;
  for (int e = 1; e <= episodes; ++e) {
    const Instance instance(spec, replication_seed(777, static_cast<std::uint64_t>(e)));
    Rng set_rng = make_stream(instance.seed(), Stream::kActionSets);
    Rng noise_rng = make_stream(instance.seed(), Stream::kNoise);
    const auto set = instance.next_set(set_rng);
    const Maximizer best = maximize_linear(*set, instance.theta());
    Policy p(vcl_config(spec.horizon, spec.dim, 2.0), spec.dim, instance.seed());
    bool held = true;
    for (std::int64_t t = 1; t <= spec.horizon; ++t) {
      if (p.ucb_index(best.point) < best.value) held = false;
      const Selection s = p.select(*set);
      p.observe(s.action, reward(instance, s.action) + draw_noise(instance, noise_rng));
    }
    optimistic += held;
  }
  RecordProperty("optimistic_episodes", optimistic);
  EXPECT_GE(optimistic, static_cast<int>(0.95 * episodes));
}

}  // namespace
}  // namespace linbandit
