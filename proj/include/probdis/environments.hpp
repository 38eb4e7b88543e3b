#pragma once

#include "probdis/baselines.hpp"
#include "probdis/failure_map.hpp"
#include "probdis/kinematics.hpp"
#include "probdis/planner.hpp"
#include "probdis/rng.hpp"

#include <chrono>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace probdis {

enum class EnvMode { planar2d, spatial3d, spatial3d_orient };

inline std::string_view to_string(EnvMode m) {
  switch (m) {
    case EnvMode::planar2d: return "2d";
    case EnvMode::spatial3d: return "3d";
    case EnvMode::spatial3d_orient: return "3d-orient";
  }
  return "?";
}

inline EnvMode parse_mode(std::string_view s) {
  if (s == "2d") return EnvMode::planar2d;
  if (s == "3d") return EnvMode::spatial3d;
  if (s == "3d-orient") return EnvMode::spatial3d_orient;
  throw std::invalid_argument("unknown mode: " + std::string(s));
}

enum class ObstacleKind { disc2d, ball3d, disc3d };

inline std::string_view to_string(ObstacleKind k) {
  switch (k) {
    case ObstacleKind::disc2d: return "disc2d";
    case ObstacleKind::ball3d: return "ball3d";
    case ObstacleKind::disc3d: return "disc3d";
  }
  return "?";
}

inline ObstacleKind parse_obstacle_kind(std::string_view s) {
  if (s == "disc2d") return ObstacleKind::disc2d;
  if (s == "ball3d") return ObstacleKind::ball3d;
  if (s == "disc3d") return ObstacleKind::disc3d;
  throw std::invalid_argument("unknown obstacle kind: " + std::string(s));
}

/// Half thickness of a 3-D disc relative to its radius.
inline constexpr double kDiscThicknessRatio = 0.2;

struct Obstacle {
  ObstacleKind kind = ObstacleKind::disc2d;
  Eigen::Vector3d center = Eigen::Vector3d::Zero();
  double radius = 0.1;
  std::optional<UnitQuaternion> orientation;

  /// Disc normal: the local z axis, or world z without an orientation.
  Eigen::Vector3d normal() const {
    return orientation ? Eigen::Vector3d(orientation->rotation().col(2)) : Eigen::Vector3d::UnitZ();
  }

  bool contains(const Eigen::Vector3d& p) const {
    const Eigen::Vector3d d = p - center;
    switch (kind) {
      case ObstacleKind::disc2d: return d.head<2>().squaredNorm() <= radius * radius;
      case ObstacleKind::ball3d: return d.squaredNorm() <= radius * radius;
      case ObstacleKind::disc3d: {
        const Eigen::Vector3d n = normal();
        const double h = d.dot(n);
        const double radial_sq = (d - h * n).squaredNorm();
        return std::abs(h) <= kDiscThicknessRatio * radius && radial_sq <= radius * radius;
      }
    }
    return false;
  }
};

struct ExecParams {
  double s_col = 0.005;      // task-space collision sample spacing (m)
  double theta_col = 0.5;    // orientation distance below which an obstacle blocks
  double d_dist = 0.04;      // compliant deviation threshold (L1, rad)
  bool compliant = false;
  double joint_step = 0.02;  // joint-space sub-step for execution (rad)
};

struct Environment {
  EnvMode mode = EnvMode::planar2d;
  KinematicChain chain = KinematicChain::planar_arm();
  std::vector<Obstacle> obstacles;
  JointConfig start = JointConfig::Zero();
  JointConfig goal = JointConfig::Zero();
  ExecParams exec;

  int dim() const { return mode == EnvMode::planar2d ? 2 : 3; }
  bool oriented() const { return mode == EnvMode::spatial3d_orient; }

  /// fk with the orientation kept only in orientation mode.
  TaskPose pose(const JointConfig& c) const {
    TaskPose p = fk(chain, chain.clamp(c));
    if (!oriented()) p.orientation.reset();
    return p;
  }

  /// Containment gated by orientation: in orientation mode an obstacle only
  /// blocks end-effector orientations within theta_col of its own.
  bool blocks(const Obstacle& o, const TaskPose& p) const {
    if (!o.contains(p.position)) return false;
    if (!oriented() || !o.orientation || !p.orientation) return true;
    return quat_geodesic(*p.orientation, *o.orientation) < exec.theta_col;
  }

  bool free(const TaskPose& p) const {
    for (const auto& o : obstacles) {
      if (blocks(o, p)) return false;
    }
    return true;
  }
};

struct Contact {
  Eigen::Vector3d position;
  Eigen::Vector3d direction;
  std::optional<UnitQuaternion> orientation;
  std::size_t obstacle = 0;
};

/// Walks the straight task-space segment at spacing s_col (start excluded) and
/// reports the first sample inside a blocking obstacle. Orientation is slerped.
inline std::optional<Contact> collision_check(const Environment& env, const TaskPose& from,
                                              const TaskPose& to) {
  const Eigen::Vector3d delta = to.position - from.position;
  const double len = delta.norm();
  if (len <= 0.0) return std::nullopt;
  const auto n = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(len / env.exec.s_col)));
  const Eigen::Vector3d dir = delta / len;
  for (std::size_t k = 1; k <= n; ++k) {
    const double t = static_cast<double>(k) / static_cast<double>(n);
    TaskPose p;
    p.position = from.position + t * delta;
    p.dim = from.dim;
    if (from.orientation && to.orientation) {
      p.orientation = UnitQuaternion(from.orientation->eigen().slerp(t, to.orientation->eigen()));
    } else {
      p.orientation = to.orientation;
    }
    for (std::size_t i = 0; i < env.obstacles.size(); ++i) {
      if (env.blocks(env.obstacles[i], p)) return Contact{p.position, dir, p.orientation, i};
    }
  }
  return std::nullopt;
}

/// Compliant-arm failure rule: the L1 gap between commanded and achieved
/// joint configurations exceeds d_dist.
inline bool compliant_failure(const JointConfig& desired, const JointConfig& achieved, double d_dist) {
  return (desired - achieved).cwiseAbs().sum() > d_dist;
}

struct ExecutionOutcome {
  enum class Status { reached_goal, blocked, stopped_short };
  Status status = Status::stopped_short;
  std::optional<FailureRecord> failure;
  JointConfig resume_at = JointConfig::Zero();
  std::size_t resume_index = 0;  // via point index of resume_at
  std::optional<std::size_t> obstacle;
};

/// Runs the path segment by segment. A contact stops the motion, produces a
/// failure record, and sends the robot back to the via point that began the
/// blocked segment. A clean run ending away from the goal stops short there.
inline ExecutionOutcome execute_path(const Environment& env, const Path& path) {
  if (path.size() < 1) throw std::invalid_argument("empty path");
  ExecutionOutcome out;
  for (std::size_t i = 0; i + 1 < path.size(); ++i) {
    const JointConfig& a = path.via[i];
    const JointConfig& b = path.via[i + 1];
    const double len = (b - a).norm();
    const auto n = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(len / env.exec.joint_step)));
    TaskPose prev = env.pose(a);
    JointConfig achieved = a;
    for (std::size_t k = 1; k <= n; ++k) {
      const JointConfig c = env.chain.clamp(a + (static_cast<double>(k) / static_cast<double>(n)) * (b - a));
      const TaskPose cur = env.pose(c);
      if (auto hit = collision_check(env, prev, cur)) {
        if (env.exec.compliant && !compliant_failure(b, achieved, env.exec.d_dist)) {
          // Within the compliance band: the arm yields and the via point counts as reached.
          break;
        }
        FailureRecord rec;
        rec.position = hit->position;
        rec.direction = hit->direction;
        rec.dim = env.dim();
        if (env.oriented()) rec.orientation = hit->orientation;
        out.status = ExecutionOutcome::Status::blocked;
        out.failure = rec;
        out.resume_at = a;
        out.resume_index = i;
        out.obstacle = hit->obstacle;
        return out;
      }
      prev = cur;
      achieved = c;
    }
  }
  out.resume_index = path.size() - 1;
  out.resume_at = path.back();
  out.status = (path.back() - env.goal).squaredNorm() == 0.0 ? ExecutionOutcome::Status::reached_goal
                                                             : ExecutionOutcome::Status::stopped_short;
  return out;
}

struct Method {
  enum class Kind { probabilistic, hard, epsilon };
  Kind kind = Kind::probabilistic;
  double value = kDefaultCFail;  // C_FAIL, tau, or epsilon

  static Method probabilistic(double c_fail = kDefaultCFail) { return {Kind::probabilistic, c_fail}; }
  static Method hard(double tau) { return {Kind::hard, tau}; }
  static Method epsilon(double eps) { return {Kind::epsilon, eps}; }

  /// "prob", "prob:200", "hard:0.01", "eps:0.2"
  std::string label() const {
    auto num = [](double v) {
      std::string s = std::to_string(v);
      s.erase(s.find_last_not_of('0') + 1);
      if (!s.empty() && s.back() == '.') s.pop_back();
      return s;
    };
    switch (kind) {
      case Kind::probabilistic: return value == kDefaultCFail ? "prob" : "prob:" + num(value);
      case Kind::hard: return "hard:" + num(value);
      case Kind::epsilon: return "eps:" + num(value);
    }
    return "?";
  }

  static Method parse(std::string_view s) {
    const auto colon = s.find(':');
    const std::string_view head = s.substr(0, colon);
    const bool has_value = colon != std::string_view::npos;
    const double v = has_value ? std::stod(std::string(s.substr(colon + 1))) : 0.0;
    if (head == "prob") return probabilistic(has_value ? v : kDefaultCFail);
    if (head == "hard" && has_value) return hard(v);
    if (head == "eps" && has_value) return epsilon(v);
    throw std::invalid_argument("unknown method: " + std::string(s));
  }
};

inline constexpr int kMaxFailures = 20;  // N_ITER
inline constexpr int kDefaultBudget = 20;

struct TrialResult {
  bool success = false;
  int paths_executed = 0;
  int collisions = 0;
  std::uint64_t seed = 0;
  double wall_time = 0.0;  // seconds
  double plan_time = 0.0;  // seconds spent planning
};

/// Everything a trial did, for dumps and rendering.
struct TrialTrace {
  FailureMap map;
  std::vector<Path> paths;
  std::vector<ExecutionOutcome> outcomes;
  std::vector<double> plan_seconds;
};

struct DisentangleOptions {
  PlannerParams planner;
  EpsilonParams epsilon;
};

/// Plans one path with the chosen method from `current`.
inline Path plan_with(const Method& method, const FailureMap& map, const Environment& env,
                      const JointConfig& current, const DisentangleOptions& opts, Rng& rng) {
  switch (method.kind) {
    case Method::Kind::probabilistic: {
      auto res = plan_probabilistic(map, current, env.goal, opts.planner, env.chain, rng);
      return res.planned->path;
    }
    case Method::Kind::hard:
      return hard_plan(map, current, env.goal, opts.planner, HardParams{method.value}, env.chain, rng).path;
    case Method::Kind::epsilon: {
      EpsilonParams ep = opts.epsilon;
      ep.epsilon = method.value;
      return epsilon_plan(current, env.goal, ep, env.chain, rng);
    }
  }
  throw std::logic_error("unhandled method");
}

/// Plan, execute, record, repeat: stops on reaching the goal, after `budget`
/// executed paths, or once the map holds N_ITER failures. Replanning starts
/// where the robot retreated to.
inline TrialResult run_disentangle(const Environment& env, const Method& method, int budget,
                                   std::uint64_t seed, const DisentangleOptions& opts = {},
                                   TrialTrace* trace = nullptr) {
  if (budget < 1) throw std::invalid_argument("budget must be at least 1");
  using clock = std::chrono::steady_clock;
  const auto t0 = clock::now();
  TrialResult res;
  res.seed = seed;
  const double c_fail = method.kind == Method::Kind::probabilistic ? method.value : kDefaultCFail;
  FailureMap map(c_fail);
  JointConfig current = env.start;
  int episode = 0;
  while (res.paths_executed < budget && static_cast<int>(map.size()) < kMaxFailures) {
    if ((current - env.goal).squaredNorm() == 0.0) {
      res.success = true;
      break;
    }
    Rng rng(mix_seed({seed, static_cast<std::uint64_t>(episode++)}));
    const auto p0 = clock::now();
    Path path = plan_with(method, map, env, current, opts, rng);
    const double plan_s = std::chrono::duration<double>(clock::now() - p0).count();
    res.plan_time += plan_s;
    ++res.paths_executed;
    const ExecutionOutcome outcome = execute_path(env, path);
    if (trace) {
      trace->paths.push_back(path);
      trace->outcomes.push_back(outcome);
      trace->plan_seconds.push_back(plan_s);
    }
    if (outcome.status == ExecutionOutcome::Status::reached_goal) {
      res.success = true;
      break;
    }
    if (outcome.status == ExecutionOutcome::Status::blocked) {
      ++res.collisions;
      const auto& f = *outcome.failure;
      map = map.with(f.position, f.direction, f.dim, f.orientation);
    }
    current = outcome.resume_at;
  }
  res.wall_time = std::chrono::duration<double>(clock::now() - t0).count();
  if (trace) trace->map = map;
  return res;
}

// ---------------------------------------------------------------------------
// Scenario generation

struct ScenarioSpec {
  EnvMode mode = EnvMode::planar2d;
  int obstacles = 0;
  double radius_lo = 0.0;  // zero: mode default
  double radius_hi = 0.0;
  std::optional<JointConfig> start;
  std::optional<JointConfig> goal;
  ExecParams exec;
};

class InfeasibleScenario : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr int kMaxRedraws = 10000;

inline JointConfig default_start(EnvMode mode) {
  JointConfig c;
  if (mode == EnvMode::planar2d) {
    c << -0.7, 0.4, 0.4, 0.4, 0.3, 0.3, 0.3;
  } else {
    c << -0.8, 1.2, 0.0, -1.0, 0.0, 0.9, 0.0;
  }
  return c;
}

inline JointConfig default_goal(EnvMode mode) {
  JointConfig c;
  if (mode == EnvMode::planar2d) {
    c << -2.6, -0.3, -0.3, -0.2, -0.2, -0.2, -0.2;
  } else {
    c << 1.4, 1.0, 0.3, -1.2, 0.2, 1.0, 0.4;
  }
  return c;
}

inline UnitQuaternion random_orientation(Rng& rng) {
  return UnitQuaternion(rng.normal(), rng.normal(), rng.normal(), rng.normal());
}

/// Random hidden-obstacle world. Obstacles are uniform over the reachable
/// annulus (2-D) or shell around the shoulder (3-D); draws covering the start
/// or goal end-effector point are redrawn.
inline Environment generate_scenario(const ScenarioSpec& spec, std::uint64_t seed) {
  if (spec.obstacles < 0) throw std::invalid_argument("obstacle count must be non-negative");
  Environment env;
  env.mode = spec.mode;
  env.exec = spec.exec;
  env.chain = spec.mode == EnvMode::planar2d ? KinematicChain::planar_arm() : KinematicChain::iiwa();
  env.start = spec.start.value_or(default_start(spec.mode));
  env.goal = spec.goal.value_or(default_goal(spec.mode));

  const double reach = env.chain.reach();
  double r_lo = spec.radius_lo;
  double r_hi = spec.radius_hi;
  if (r_hi <= 0.0) {
    if (spec.mode == EnvMode::planar2d) {
      r_lo = 0.03 * reach;
      r_hi = 0.10 * reach;
    } else {
      r_lo = 0.05;
      r_hi = 0.15;
    }
  }
  if (!(r_lo > 0.0 && r_lo <= r_hi)) throw std::invalid_argument("bad obstacle radius range");

  const Eigen::Vector3d start_pt = fk_position(env.chain, env.start);
  const Eigen::Vector3d goal_pt = fk_position(env.chain, env.goal);
  Rng rng(mix_seed({seed, 0x5ce9a410ull}));
  int redraws = 0;

  // Shell around the first bending joint: the whole base for the planar arm,
  // the shoulder for the spatial one.
  const Eigen::Vector3d shoulder =
      spec.mode == EnvMode::planar2d ? Eigen::Vector3d::Zero() : Eigen::Vector3d(0, 0, env.chain.lengths[0]);
  const double outer = spec.mode == EnvMode::planar2d ? 0.95 * reach : 0.95 * (reach - env.chain.lengths[0]);
  const double inner = 0.15 * outer;

  while (static_cast<int>(env.obstacles.size()) < spec.obstacles) {
    Obstacle o;
    o.radius = rng.uniform(r_lo, r_hi);
    if (spec.mode == EnvMode::planar2d) {
      o.kind = ObstacleKind::disc2d;
      const double r = std::sqrt(rng.uniform(inner * inner, outer * outer));
      const double th = rng.uniform(-std::numbers::pi, std::numbers::pi);
      o.center = {r * std::cos(th), r * std::sin(th), 0.0};
    } else {
      o.kind = rng.uniform() < 0.5 ? ObstacleKind::ball3d : ObstacleKind::disc3d;
      const double r = std::cbrt(rng.uniform(inner * inner * inner, outer * outer * outer));
      Eigen::Vector3d dir(rng.normal(), rng.normal(), rng.normal());
      while (dir.norm() == 0.0) dir = {rng.normal(), rng.normal(), rng.normal()};
      o.center = shoulder + r * dir.normalized();
      if (spec.mode == EnvMode::spatial3d_orient) o.orientation = random_orientation(rng);
    }
    if (o.contains(start_pt) || o.contains(goal_pt)) {
      if (++redraws > kMaxRedraws) throw InfeasibleScenario("obstacle redraw cap exceeded");
      continue;
    }
    env.obstacles.push_back(o);
  }
  return env;
}

}  // namespace probdis
