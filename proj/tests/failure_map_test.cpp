#include "probdis/failure_map.hpp"
#include "probdis/rng.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>
#include <vector>

namespace {

using namespace probdis;

constexpr double kPi = std::numbers::pi;

TaskPose at(double x, double y, double z = 0.0) {
  TaskPose p;
  p.position = {x, y, z};
  return p;
}

FailureRecord record(Eigen::Vector3d x, Eigen::Vector3d v) {
  FailureRecord f;
  f.position = x;
  f.direction = v.normalized();
  return f;
}

Eigen::Vector3d random_unit(Rng& rng, int dim) {
  Eigen::Vector3d v = Eigen::Vector3d::Zero();
  while (v.norm() < 1e-6) {
    for (int i = 0; i < dim; ++i) v[i] = rng.normal();
  }
  return v.normalized();
}

Eigen::Vector3d random_point(Rng& rng, int dim, double half = 1.0) {
  Eigen::Vector3d p = Eigen::Vector3d::Zero();
  for (int i = 0; i < dim; ++i) p[i] = rng.uniform(-half, half);
  return p;
}

FailureMap random_map(Rng& rng, int dim, std::size_t n, double c_fail = kDefaultCFail) {
  FailureMap m(c_fail);
  for (std::size_t i = 0; i < n; ++i) m = m.with(random_point(rng, dim), random_unit(rng, dim), dim);
  return m;
}

// --- pointwise model -------------------------------------------------------

TEST(FailureModel, BehindTheBlockageIsHalfAtUnitDistance) {
  const auto f = record({0, 0, 0}, {1, 0, 0});
  EXPECT_NEAR(prob_fail_single(at(1, 0), f, 1.0), 0.5, 1e-15);
}

TEST(FailureModel, ApproachSideIsSafe) {
  const auto f = record({0, 0, 0}, {1, 0, 0});
  for (double c : {0.1, 1.0, 100.0}) EXPECT_EQ(prob_fail_single(at(-1, 0), f, c), 0.0);
}

TEST(FailureModel, OppositeOrientationHalvesTheValue) {
  auto f = record({0, 0, 0}, {1, 0, 0});
  f.orientation = UnitQuaternion(1, 0, 0, 0);
  TaskPose p = at(1, 0);
  p.orientation = UnitQuaternion(0, 1, 0, 0);
  EXPECT_NEAR(prob_fail_single(p, f, 1.0), 0.25, 1e-15);
}

TEST(FailureModel, MatchesIndependentOracle) {
  Rng rng(21);
  for (int n = 0; n < 10000; ++n) {
    const int dim = n % 2 ? 3 : 2;
    const auto f = record(random_point(rng, dim), random_unit(rng, dim));
    const Eigen::Vector3d x = random_point(rng, dim);
    const double c = rng.uniform(1.0, 500.0);
    const double got = prob_fail_single(at(x.x(), x.y(), x.z()), f, c);
    EXPECT_NEAR(got, oracle::single(x, f, c), 1e-9);
    EXPECT_GE(got, 0.0);
    EXPECT_LE(got, 1.0);
  }
}

TEST(FailureModel, StrictlyDecreasesWithDistanceAtFixedAngle) {
  Rng rng(22);
  for (int n = 0; n < 10000; ++n) {
    const int dim = n % 2 ? 3 : 2;
    const auto f = record(random_point(rng, dim), random_unit(rng, dim));
    Eigen::Vector3d u = random_unit(rng, dim);
    // Keep clear of the approach axis, where the value is identically zero.
    if (u.dot(f.direction) > 0.99) u = -u;
    const double d1 = rng.uniform(0.01, 1.0);
    const double d2 = d1 + rng.uniform(0.01, 1.0);
    const Eigen::Vector3d near = f.position - d1 * u;
    const Eigen::Vector3d far = f.position - d2 * u;
    EXPECT_GT(prob_fail_single(at(near.x(), near.y(), near.z()), f, kDefaultCFail),
              prob_fail_single(at(far.x(), far.y(), far.z()), f, kDefaultCFail));
  }
}

TEST(FailureModel, BehindIsWorseThanInFront) {
  Rng rng(23);
  for (int n = 0; n < 10000; ++n) {
    const int dim = n % 2 ? 3 : 2;
    const auto f = record(random_point(rng, dim), random_unit(rng, dim));
    const double d = rng.uniform(0.001, 2.0);
    const Eigen::Vector3d behind = f.position + d * f.direction;
    const Eigen::Vector3d front = f.position - d * f.direction;
    EXPECT_GT(prob_fail_single(at(behind.x(), behind.y(), behind.z()), f, kDefaultCFail),
              prob_fail_single(at(front.x(), front.y(), front.z()), f, kDefaultCFail));
  }
}

// --- the map ---------------------------------------------------------------

TEST(FailureMapTest, EmptyMapIsZero) {
  const FailureMap m;
  EXPECT_EQ(m.prob_fail(at(0.3, -0.2)), 0.0);
  EXPECT_EQ(prob_fail(m, at(0, 0)), 0.0);
}

TEST(FailureMapTest, SingletonEqualsRecordValue) {
  const FailureMap m = FailureMap(50.0).with({0.1, 0.2, 0}, {0, 1, 0}, 2);
  const TaskPose p = at(0.15, 0.4);
  EXPECT_EQ(m.prob_fail(p), prob_fail_single(p, m[0], 50.0));
}

TEST(FailureMapTest, MaximumOverRecords) {
  // Each record points straight at the origin pose, so its value is 1 / (1 + D C).
  // D C = 4, 3/7 and 9 give 0.2, 0.7 and 0.1.
  FailureMap m(100.0);
  for (double dc : {4.0, 3.0 / 7.0, 9.0}) {
    const double d = std::sqrt(dc / 100.0);
    m = m.with({d, 0, 0}, {-1, 0, 0}, 2);
  }
  EXPECT_NEAR(prob_fail_single(at(0, 0), m[0], 100.0), 0.2, 1e-12);
  EXPECT_NEAR(prob_fail_single(at(0, 0), m[2], 100.0), 0.1, 1e-12);
  EXPECT_NEAR(m.prob_fail(at(0, 0)), 0.7, 1e-12);
}

TEST(FailureMapTest, RecordFailureAppendsAndKeepsEarlierRecords) {
  Rng rng(24);
  FailureMap m;
  EXPECT_EQ(m.size(), 0u);
  for (std::size_t k = 0; k < 10; ++k) {
    const FailureMap next = record_failure(m, random_point(rng, 2), random_unit(rng, 2) * 3.0, 2);
    ASSERT_EQ(next.size(), k + 1);
    for (std::size_t i = 0; i < k; ++i) {
      EXPECT_EQ(next[i].position, m[i].position);
      EXPECT_EQ(next[i].direction, m[i].direction);
    }
    EXPECT_NEAR(next[k].direction.norm(), 1.0, 1e-12);
    EXPECT_EQ(next.prob_fail(at(next[k].position.x(), next[k].position.y())), 1.0);
    m = next;
  }
  EXPECT_THROW(record_failure(m, {0, 0, 0}, {0, 0, 0}, 2), std::invalid_argument);
}

TEST(FailureMapTest, AddingRecordsNeverLowersAnyValue) {
  Rng rng(25);
  for (int trial = 0; trial < 200; ++trial) {
    const int dim = trial % 2 ? 3 : 2;
    FailureMap m = random_map(rng, dim, rng.below(8));
    std::vector<TaskPose> poses;
    for (int i = 0; i < 50; ++i) {
      const Eigen::Vector3d x = random_point(rng, dim);
      poses.push_back(at(x.x(), x.y(), x.z()));
    }
    std::vector<double> before;
    for (const auto& p : poses) before.push_back(m.prob_fail(p));
    m = m.with(random_point(rng, dim), random_unit(rng, dim), dim);
    for (std::size_t i = 0; i < poses.size(); ++i) {
      const double after = m.prob_fail(poses[i]);
      EXPECT_GE(after, before[i]);
      EXPECT_LE(after, 1.0);
    }
  }
}

TEST(FailureMapTest, PrunedEvaluationEqualsFullScan) {
  Rng rng(26);
  for (int trial = 0; trial < 100; ++trial) {
    const int dim = trial % 2 ? 3 : 2;
    FailureMap m = random_map(rng, dim, 1 + rng.below(150), rng.uniform(10.0, 400.0));
    // Tiny cutoffs force the fallback scan over far records.
    if (trial % 3 == 0) m.set_cutoff(rng.uniform(0.01, 0.2));
    for (int i = 0; i < 100; ++i) {
      const Eigen::Vector3d x = random_point(rng, dim, 1.5);
      const TaskPose p = at(x.x(), x.y(), x.z());
      EXPECT_EQ(m.prob_fail(p), m.prob_fail_full_scan(p));
    }
  }
}

TEST(FailureMapTest, OrientedRecordsUseOrientationTerm) {
  Rng rng(27);
  FailureMap m;
  const UnitQuaternion q(rng.normal(), rng.normal(), rng.normal(), rng.normal());
  m = m.with({0, 0, 0}, {1, 0, 0}, 3, q);
  EXPECT_TRUE(m.oriented());
  TaskPose p = at(0.1, 0.02, 0.0);
  p.orientation = UnitQuaternion(rng.normal(), rng.normal(), rng.normal(), rng.normal());
  const double d_orient = quat_geodesic(*p.orientation, q);
  EXPECT_NEAR(m.prob_fail(p), oracle::single(p.position, m[0], m.c_fail(), d_orient), 1e-9);
}

TEST(FailureMapTest, TextRoundTrip) {
  Rng rng(28);
  for (int dim : {2, 3}) {
    FailureMap m(123.5);
    for (int i = 0; i < 7; ++i) {
      std::optional<UnitQuaternion> q;
      if (dim == 3 && i % 2) q = UnitQuaternion(rng.normal(), rng.normal(), rng.normal(), rng.normal());
      m = m.with(random_point(rng, dim), random_unit(rng, dim), dim, q);
    }
    std::stringstream ss;
    write_failure_map(ss, m, dim);
    int dim_read = 0;
    const FailureMap back = read_failure_map(ss, &dim_read);
    EXPECT_EQ(dim_read, dim);
    EXPECT_EQ(back.c_fail(), m.c_fail());
    ASSERT_EQ(back.size(), m.size());
    for (std::size_t i = 0; i < m.size(); ++i) {
      EXPECT_EQ(back[i].position, m[i].position);
      EXPECT_NEAR((back[i].direction - m[i].direction).norm(), 0.0, 1e-15);
      EXPECT_EQ(back[i].orientation.has_value(), m[i].orientation.has_value());
    }
  }
  std::stringstream bad("not a map\n");
  EXPECT_THROW(read_failure_map(bad), std::runtime_error);
}

// --- paths -----------------------------------------------------------------

std::vector<JointConfig> random_path(Rng& rng, const KinematicChain& chain, std::size_t vias) {
  std::vector<JointConfig> p;
  for (std::size_t i = 0; i < vias; ++i) {
    JointConfig c;
    for (int j = 0; j < kNumJoints; ++j) c[j] = rng.uniform(-1.0, 1.0) * std::min(1.5, chain.limits[j].hi);
    p.push_back(c);
  }
  return p;
}

TEST(PathFailure, EmptyMapIsZero) {
  const auto chain = KinematicChain::planar_arm();
  Rng rng(31);
  const auto path = random_path(rng, chain, 4);
  EXPECT_EQ(path_failure(FailureMap(), path, chain, {}), 0.0);
}

// Rotating only the first joint of the upright spatial arm leaves the tool at
// (0, 0, 1.306), so every sample along such a segment sees the same value.
struct UprightFixture {
  KinematicChain chain = KinematicChain::iiwa();
  JointConfig a = JointConfig::Zero();
  JointConfig b = JointConfig::Zero();
};

TEST(PathFailure, TwoSamplesAtOneHalf) {
  UprightFixture u;
  const double delta = 0.04;
  u.b[0] = 2 * delta;
  // Straight above the tool and pointing down at it: alpha = pi, D C = 1.
  const FailureMap m = FailureMap(100.0).with({0, 0, 1.306 + 0.1}, {0, 0, -1}, 3);
  const std::vector<JointConfig> path{u.a, u.b};
  EXPECT_EQ(segment_failure(m, u.chain, u.a, u.b, {delta}).samples, 2u);
  EXPECT_NEAR(path_failure(m, path, u.chain, {delta, CombineMode::survival}), 0.75, 1e-9);
  EXPECT_NEAR(path_failure(m, path, u.chain, {delta, CombineMode::literal_product}), 0.25, 1e-9);

  const std::vector<double> probs{0.5, 0.5};
  const std::vector<double> weights{1.0, 1.0};
  EXPECT_NEAR(combine_samples(probs, weights, CombineMode::survival), 0.75, 1e-15);
  EXPECT_NEAR(combine_samples(probs, weights, CombineMode::literal_product), 0.25, 1e-15);
}

TEST(PathFailure, AppendingSafeSegmentLeavesValueUnchanged) {
  UprightFixture u;
  // Straight above the tool, pointing up: the tool sits exactly on the approach side.
  FailureMap m = FailureMap().with({0, 0, 1.5}, {0, 0, 1}, 3);
  Rng rng(32);
  auto path = random_path(rng, u.chain, 3);
  path.push_back(u.a);
  const double before = path_failure(m, path, u.chain, {});
  u.b[0] = 1.0;
  path.push_back(u.b);
  EXPECT_EQ(path_failure(m, path, u.chain, {}), before);
}

TEST(PathFailure, SurvivalMatchesOracleAndGrowsWithAppendedSegments) {
  Rng rng(33);
  int cases = 0;
  for (int trial = 0; trial < 300; ++trial) {
    const bool planar = trial % 2 == 0;
    const auto chain = planar ? KinematicChain::planar_arm() : KinematicChain::iiwa();
    const int dim = planar ? 2 : 3;
    const FailureMap m = random_map(rng, dim, 1 + rng.below(10));
    const double delta = rng.uniform(0.02, 0.2);
    auto path = random_path(rng, chain, 2);
    double prev = 0.0;
    for (int seg = 0; seg < 4; ++seg) {
      const double got = path_failure(m, path, chain, {delta});
      EXPECT_NEAR(got, oracle::path(m, path, chain, delta), 1e-6);
      EXPECT_GE(got, prev);
      EXPECT_GE(got, 0.0);
      EXPECT_LE(got, 1.0);
      prev = got;
      path.push_back(random_path(rng, chain, 1).front());
      ++cases;
    }
  }
  EXPECT_GE(cases, 1000);
}

TEST(PathFailure, LiteralProductStaysInRange) {
  Rng rng(34);
  const auto chain = KinematicChain::planar_arm();
  for (int trial = 0; trial < 500; ++trial) {
    const FailureMap m = random_map(rng, 2, 1 + rng.below(5));
    const auto path = random_path(rng, chain, 2 + rng.below(3));
    const double v = path_failure(m, path, chain, {0.04, CombineMode::literal_product});
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, 1.0);
  }
}

TEST(PathFailure, AbortedSegmentIsALowerBoundAboveTheLimit) {
  Rng rng(35);
  const auto chain = KinematicChain::planar_arm();
  for (int trial = 0; trial < 300; ++trial) {
    const FailureMap m = random_map(rng, 2, 1 + rng.below(10));
    const auto path = random_path(rng, chain, 2);
    const SegmentFailure full = segment_failure(m, chain, path[0], path[1], {});
    const double limit = rng.uniform(0.0, 1.2) * full.hazard();
    const SegmentFailure cut = segment_failure(m, chain, path[0], path[1], {}, limit);
    if (cut.aborted) {
      EXPECT_GE(cut.hazard(), limit);
      EXPECT_LE(cut.hazard(), full.hazard());
    } else {
      EXPECT_EQ(cut.hazard(), full.hazard());
    }
  }
}

TEST(PathFailure, CompositionHelpers) {
  EXPECT_NEAR(compose_failure(0.2, 0.5), 0.6, 1e-15);
  EXPECT_NEAR(probability_from_hazard(hazard_from_probability(0.2) + hazard_from_probability(0.5)), 0.6, 1e-15);
  EXPECT_THROW(path_failure(FailureMap(), std::vector<JointConfig>{JointConfig::Zero()},
                            KinematicChain::planar_arm(), {}),
               std::invalid_argument);
}

}  // namespace
