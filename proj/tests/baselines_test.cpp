#include "probdis/baselines.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

namespace {

using namespace probdis;

struct Scene {
  KinematicChain chain = KinematicChain::planar_arm();
  JointConfig start;
  JointConfig goal;
  Scene() {
    start << -0.7, 0.4, 0.4, 0.4, 0.3, 0.3, 0.3;
    goal << -2.6, -0.3, -0.3, -0.2, -0.2, -0.2, -0.2;
  }
};

// Every planner sample on the path (segment start excluded) stays below tau.
void expect_admissible(const Path& path, const FailureMap& m, const KinematicChain& chain, double tau,
                       double delta) {
  for (std::size_t i = 0; i + 1 < path.size(); ++i) {
    const JointConfig& a = path.via[i];
    const JointConfig& b = path.via[i + 1];
    const double len = (b - a).norm();
    if (len == 0.0) continue;
    const int n = std::max(1, static_cast<int>(std::ceil(len / delta - 1e-9)));
    for (int k = 1; k <= n; ++k) {
      const JointConfig c = a + (static_cast<double>(k) / n) * (b - a);
      EXPECT_LT(m.prob_fail_full_scan(fk(chain, c)), tau);
    }
  }
}

// Records on a circle around the goal's end effector, each pointing outward:
// the band just outside the circle is above tau everywhere, the inside is clear.
FailureMap ring_around(const Eigen::Vector3d& centre, double radius, int n, double c_fail) {
  FailureMap m(c_fail);
  for (int k = 0; k < n; ++k) {
    const double a = 2.0 * std::numbers::pi * k / n;
    const Eigen::Vector3d u(std::cos(a), std::sin(a), 0.0);
    m = m.with(centre + radius * u, u, 2);
  }
  return m;
}

TEST(HardBaseline, EmptyMapFindsShortestStylePath) {
  Scene s;
  const FailureMap m;
  const HardCost cost{&m, &s.chain, 0.01, 0.04};
  EXPECT_DOUBLE_EQ(cost.segment(s.start, s.goal), (s.goal - s.start).norm());
  Rng rng(1);
  const HardPlan plan = hard_plan(m, s.start, s.goal, PlannerParams{}, HardParams{0.01}, s.chain, rng);
  ASSERT_TRUE(plan.found);
  EXPECT_EQ(plan.path.front(), s.start);
  EXPECT_EQ(plan.path.back(), s.goal);
  EXPECT_NEAR(plan.result.planned->cost, plan.path.joint_length(), 1e-9);
}

TEST(HardBaseline, ThresholdIsClosed) {
  Scene s;
  const FailureMap m = FailureMap().with({0.3, 0.4, 0}, {1, 1, 0}, 2);
  Rng rng(2);
  int checked = 0;
  for (int i = 0; i < 200; ++i) {
    const JointConfig c = sample_uniform(s.chain, rng);
    const double p = m.prob_fail(fk(s.chain, c));
    if (!(p > 0.0 && p < 1.0)) continue;
    EXPECT_FALSE((HardCost{&m, &s.chain, p, 0.04}.admissible(c)));
    EXPECT_TRUE((HardCost{&m, &s.chain, std::nextafter(p, 1.0), 0.04}.admissible(c)));
    ++checked;
  }
  EXPECT_GT(checked, 100);
  EXPECT_THROW(HardParams{0.0}.validate(), std::invalid_argument);
  EXPECT_THROW(HardParams{1.0}.validate(), std::invalid_argument);
}

TEST(HardBaseline, RingAroundGoalRejectsEveryBridge) {
  Scene s;
  const double tau = 0.01;
  const Eigen::Vector3d centre = fk_position(s.chain, s.goal);
  const FailureMap m = ring_around(centre, 0.1, 36, 2000.0);
  ASSERT_LT(m.prob_fail(fk(s.chain, s.goal)), tau);
  ASSERT_LT(m.prob_fail(fk(s.chain, s.start)), tau);
  // The band is closed: every point on a circle just outside the ring is blocked.
  for (int k = 0; k < 720; ++k) {
    const double a = 2.0 * std::numbers::pi * k / 720;
    for (double r : {0.1, 0.15, 0.25}) {
      TaskPose p;
      p.position = centre + r * Eigen::Vector3d(std::cos(a), std::sin(a), 0.0);
      ASSERT_GE(m.prob_fail(p), tau) << "angle " << a << " radius " << r;
    }
  }
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    Rng rng(seed);
    const HardPlan plan = hard_plan(m, s.start, s.goal, PlannerParams{}, HardParams{tau}, s.chain, rng);
    EXPECT_FALSE(plan.found);
    EXPECT_TRUE(plan.result.bridges.empty());
    EXPECT_EQ(plan.path.front(), s.start);
    EXPECT_GE(plan.path.size(), 2u);
    expect_admissible(plan.path, m, s.chain, tau, 0.04);
  }
}

TEST(HardBaseline, PathsNeverTouchForbiddenSamples) {
  Scene s;
  Rng mrng(3);
  for (int trial = 0; trial < 20; ++trial) {
    FailureMap m;
    for (int i = 0; i < 1 + trial % 6; ++i) {
      m = m.with({mrng.uniform(-0.8, 0.8), mrng.uniform(-0.8, 0.8), 0}, {mrng.normal(), mrng.normal(), 0}, 2);
    }
    const double tau = trial % 2 ? 0.01 : 0.02;
    PlannerParams p;
    p.k_iter = 60;
    Rng rng(trial);
    const HardPlan plan = hard_plan(m, s.start, s.goal, p, HardParams{tau}, s.chain, rng);
    expect_admissible(plan.path, m, s.chain, tau, p.delta);
    EXPECT_EQ(plan.path.front(), s.start);
    if (plan.found) {
      EXPECT_EQ(plan.path.back(), s.goal);
    }
  }
}

TEST(HardBaseline, RootOnlyTreeFallsBackToStandingStill) {
  Scene s;
  // Records at the start pointing every which way: any move away from it ends
  // up behind one of them, so every first sample is forbidden.
  const Eigen::Vector3d x = fk_position(s.chain, s.start);
  FailureMap m(1.0);
  for (int k = 0; k < 8; ++k) {
    const double a = std::numbers::pi * k / 4;
    m = m.with(x, {std::cos(a), std::sin(a), 0}, 2);
  }
  Rng rng(4);
  const HardPlan plan = hard_plan(m, s.start, s.goal, PlannerParams{}, HardParams{0.01}, s.chain, rng);
  EXPECT_FALSE(plan.found);
  EXPECT_EQ(plan.result.start_tree.size(), 1u);
  ASSERT_EQ(plan.path.size(), 2u);
  EXPECT_EQ(plan.path.via[0], s.start);
  EXPECT_EQ(plan.path.via[1], s.start);
}

TEST(HardBaseline, SeedDeterministic) {
  Scene s;
  const FailureMap m = FailureMap().with({0.1, 0.6, 0}, {0, 1, 0}, 2);
  Rng a(5);
  Rng b(5);
  const auto pa = hard_plan(m, s.start, s.goal, PlannerParams{}, HardParams{0.02}, s.chain, a).path;
  const auto pb = hard_plan(m, s.start, s.goal, PlannerParams{}, HardParams{0.02}, s.chain, b).path;
  ASSERT_EQ(pa.size(), pb.size());
  for (std::size_t i = 0; i < pa.size(); ++i) EXPECT_EQ(pa.via[i], pb.via[i]);
}

TEST(EpsilonBaseline, FullyGreedyWalksStraightToGoal) {
  Scene s;
  Rng rng(6);
  EpsilonParams ep;
  ep.epsilon = 1.0;
  const Path p = epsilon_plan(s.start, s.goal, ep, s.chain, rng);
  const JointConfig dir = (s.goal - s.start).normalized();
  const double d = (s.goal - s.start).norm();
  EXPECT_EQ(p.back(), s.goal);
  EXPECT_EQ(p.size(), static_cast<std::size_t>(std::ceil(d / ep.step)) + 1);
  for (std::size_t i = 1; i + 1 < p.size(); ++i) {
    const JointConfig off = p.via[i] - s.start;
    EXPECT_NEAR((off - off.dot(dir) * dir).norm(), 0.0, 1e-9);
    EXPECT_NEAR((p.via[i] - p.via[i - 1]).norm(), ep.step, 1e-9);
  }
}

TEST(EpsilonBaseline, StepsNeverExceedStepLength) {
  Scene s;
  for (double eps : {0.0, 0.2, 0.4, 1.0}) {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
      Rng rng(seed);
      EpsilonParams ep;
      ep.epsilon = eps;
      const JointConfig from = sample_uniform(s.chain, rng);
      const Path p = epsilon_plan(from, s.goal, ep, s.chain, rng);
      EXPECT_EQ(p.front(), from);
      EXPECT_LE(p.size(), static_cast<std::size_t>(ep.max_steps) + 2);
      for (std::size_t i = 0; i + 1 < p.size(); ++i) {
        EXPECT_LE((p.via[i + 1] - p.via[i]).norm(), ep.step + 1e-12);
        EXPECT_TRUE(s.chain.within_limits(p.via[i + 1]));
      }
      // Reaching the goal ends the walk immediately.
      for (std::size_t i = 0; i + 2 < p.size(); ++i) EXPECT_GT((p.via[i] - s.goal).norm(), ep.step);
    }
  }
}

TEST(EpsilonBaseline, PureRandomWalkRarelyArrives) {
  Scene s;
  EpsilonParams ep;
  ep.epsilon = 0.0;
  int arrived = 0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    Rng rng(seed);
    if (epsilon_plan(s.start, s.goal, ep, s.chain, rng).back() == s.goal) ++arrived;
  }
  EXPECT_LT(arrived, 5);
}

TEST(EpsilonBaseline, SeedDeterministic) {
  Scene s;
  Rng a(7);
  Rng b(7);
  const Path pa = epsilon_plan(s.start, s.goal, EpsilonParams{}, s.chain, a);
  const Path pb = epsilon_plan(s.start, s.goal, EpsilonParams{}, s.chain, b);
  ASSERT_EQ(pa.size(), pb.size());
  for (std::size_t i = 0; i < pa.size(); ++i) EXPECT_EQ(pa.via[i], pb.via[i]);
}

}  // namespace
