#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "linbandit/diagnostics.hpp"
#include "linbandit/environment.hpp"

namespace linbandit {
namespace {

TEST(Elliptical, HarmonicCase) {
  const std::vector<Eigen::VectorXd> ys(3, Eigen::VectorXd::Unit(2, 0));
  const EllipticalSums sums = elliptical_sums(ys);
  EXPECT_NEAR(sums.potential, 11.0 / 6.0, 1e-14);
  EXPECT_NEAR(sums.bound, 2.0 * std::log(4.0), 1e-14);
  EXPECT_NEAR(sums.potential / sums.bound, 0.66123522707, 1e-10);
}

TEST(Elliptical, ZeroVectorsHoldWithEquality) {
  const std::vector<Eigen::VectorXd> ys(5, Eigen::VectorXd::Zero(3));
  const EllipticalSums sums = elliptical_sums(ys);
  EXPECT_EQ(sums.potential, 0.0);
  EXPECT_EQ(sums.bound, 0.0);
}

TEST(Elliptical, RandomTrialsHaveNoViolations) {
  const EllipticalReport report = diagnostic_elliptical(EllipticalConfig{});
  EXPECT_EQ(report.trials, 1000);
  EXPECT_EQ(report.violations, 0);
  EXPECT_TRUE(report.offending_seeds.empty());
  EXPECT_GT(report.max_ratio, 0.0);
  EXPECT_LE(report.max_ratio, 1.0);
}

TEST(Elliptical, RejectsBadParameters) {
  EllipticalConfig c;
  c.trials = 0;
  EXPECT_THROW(diagnostic_elliptical(c), std::invalid_argument);
}

TEST(Tail, ZeroNoiseLeavesOnlyShrinkageBias) {
  TailConfig c;
  c.noise = NoiseKind::kZero;
  c.replications = 100;
  c.round = 200;
  const TailReport report = diagnostic_tail_bound(c);
  for (double e : report.errors) EXPECT_LE(e, 1.0 + 1e-12);
  EXPECT_LT(report.ratio, 0.5);
  EXPECT_TRUE(report.passed);
}

TEST(Tail, NoDataYet) {
  TailConfig c;
  c.dim = 1;
  c.round = 1;
  c.replications = 100;
  const TailReport report = diagnostic_tail_bound(c);
  for (double e : report.errors) EXPECT_LE(e, 1.0 + 1e-12);
}

TEST(Tail, NormalizedErrorIsSupremumOfRatio) {
  // Cauchy-Schwarz equality: the supremum is attained at x = gram (est - theta).
  Rng rng(8);
  RidgeState state(4);
  for (int t = 0; t < 20; ++t) state.update(uniform_ball(4, rng), 0.4);
  const Eigen::VectorXd theta = uniform_sphere(4, rng);
  const double sup = normalized_error(state, theta);
  const Eigen::VectorXd error = state.estimate() - theta;
  const Eigen::VectorXd best = state.gram() * error;
  const Eigen::VectorXd unit = best / best.norm();
  EXPECT_NEAR(std::abs(unit.dot(error)) / state.width(unit), sup, 1e-10);
  for (int k = 0; k < 1000; ++k) {
    const Eigen::VectorXd x = uniform_ball(4, rng);
    EXPECT_LE(std::abs(x.dot(error)) / state.width(x), sup + 1e-10);
  }
}

TEST(Tail, DefaultRatioWithinLimit) {
  const TailReport report = diagnostic_tail_bound(TailConfig{});
  EXPECT_EQ(report.errors.size(), 400u);
  EXPECT_NEAR(report.reference, std::sqrt(5.0) + std::sqrt(std::log(20.0)), 1e-12);
  EXPECT_LE(report.ratio, 4.0);
}

TEST(Tail, RejectsBadParameters) {
  TailConfig c;
  c.delta = 0.7;
  EXPECT_THROW(diagnostic_tail_bound(c), std::invalid_argument);
  c = TailConfig{};
  c.replications = 50;
  EXPECT_THROW(diagnostic_tail_bound(c), std::invalid_argument);
}

ScalingConfig small_scaling(PolicyKind kind) {
  ScalingConfig c;
  c.dims = {2};
  c.horizons = {256, 1024, 4096};
  c.replications = 5;
  c.policy = kind;
  c.threads = 1;
  return c;
}

TEST(Scaling, RandomPolicyFailsTheRatioTest) {
  const ScalingReport report = scaling_report(small_scaling(PolicyKind::kRandom));
  ASSERT_EQ(report.rows.size(), 3u);
  ASSERT_EQ(report.growth.size(), 1u);
  // Linear regret: normalized statistic grows like sqrt(T / ln T).
  const double expected = std::sqrt(4096.0 / std::log(4096.0) / (256.0 / std::log(256.0)));
  EXPECT_NEAR(report.growth[0].second, expected, 0.25 * expected);
  EXPECT_FALSE(report.passed);
}

TEST(Scaling, VclPassesAtSmallScale) {
  const ScalingReport report = scaling_report(small_scaling(PolicyKind::kVclUcb));
  EXPECT_TRUE(report.passed) << "growth " << report.growth[0].second;
}

TEST(Scaling, RejectsNonGeometricHorizons) {
  ScalingConfig c = small_scaling(PolicyKind::kVclUcb);
  c.horizons = {100, 200, 500};
  EXPECT_THROW(scaling_report(c), std::invalid_argument);
  c.horizons = {100, 200};
  EXPECT_THROW(scaling_report(c), std::invalid_argument);
}

// Two arms: e1 pays 0.5, e2 pays 0.6. One deceptive first round on e2 with a
// large negative reward pushes the estimate for e2 below zero; greedy then
// never returns to it.
TEST(Scaling, GreedyLocksOntoDeceptiveArm) {
  InstanceSpec spec;
  spec.dim = 2;
  spec.horizon = 2000;
  spec.theta_mode = ThetaMode::kFixed;
  spec.theta = Eigen::Vector2d(0.5, 0.6);
  spec.sets = SetSpec{SetGenerator::kFixedFinite, 2,
                      {Eigen::Vector2d(1, 0), Eigen::Vector2d(0, 1)}};
  // Stuck on e1 for good means regret close to 0.1 per round.
  int linear = 0;
  double greedy_total = 0.0, vcl_total = 0.0;
  const int seeds = 40;
  for (int s = 1; s <= seeds; ++s) {
    const Instance instance(spec, static_cast<std::uint64_t>(s));
    for (PolicyKind kind : {PolicyKind::kGreedy, PolicyKind::kVclUcb}) {
      PolicyConfig config;
      config.kind = kind;
      config.schedule = ConfidenceSchedule{spec.horizon, 2, false};
      Policy policy(config, 2, instance.seed());
      policy.observe(Eigen::Vector2d(0, 1), -1.0);
      const auto records = run_episode(instance, policy);
      const double regret = records.back().cumulative_regret;
      if (kind == PolicyKind::kGreedy) {
        greedy_total += regret;
        if (regret >= 0.09 * spec.horizon) ++linear;
      } else {
        vcl_total += regret;
      }
    }
  }
  RecordProperty("greedy_linear_seeds", linear);
  EXPECT_GE(linear, seeds / 4);
  EXPECT_LT(vcl_total, greedy_total);
}

TEST(Concavity, ProbeCountsTriples) {
  Rng rng(4);
  RidgeState state(2);
  const ConfidenceSchedule s{1000, 2, true};
  const ConcavityProbe probe = probe_concavity(state, s, 1.0, ActionSet::unit_ball(2), 500, rng);
  EXPECT_EQ(probe.unclamped_triples + probe.clamped_triples, 500);
  EXPECT_LE(probe.unclamped_violations, probe.unclamped_triples);
  EXPECT_THROW(probe_concavity(state, s, 1.0, ActionSet::finite({Eigen::Vector2d(1, 0)}), 5, rng),
               std::invalid_argument);
}

}  // namespace
}  // namespace linbandit
