#pragma once

#include "probdis/planner.hpp"

#include <limits>
#include <stdexcept>

namespace probdis {

struct HardParams {
  double tau = 0.01;

  void validate() const {
    if (!(tau > 0.0 && tau < 1.0)) throw std::invalid_argument("tau must lie in (0,1)");
  }
};

struct EpsilonParams {
  double epsilon = 0.2;
  double step = 0.1;
  int max_steps = 200;

  void validate() const {
    if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw std::invalid_argument("epsilon must lie in [0,1]");
    if (!(step > 0.0)) throw std::invalid_argument("step must be positive");
    if (max_steps < 0) throw std::invalid_argument("max_steps must be non-negative");
  }
};

struct HardPlan {
  PlanResult result;
  Path path;
  bool found = false;  // false: `path` is the fallback toward the goal
};

/// Threshold planner: identical trees and Connect, but segments touching a
/// pose with prob_fail >= tau are forbidden and the rest cost their length.
///
/// Without an admissible bridge the returned path follows the start tree to
/// the node nearest the goal in joint space. If the tree never left its root
/// that path has zero length: the attempt is spent standing still.
inline HardPlan hard_plan(const FailureMap& map, const JointConfig& start, const JointConfig& goal,
                          const PlannerParams& params, const HardParams& hard,
                          const KinematicChain& chain, Rng& rng) {
  hard.validate();
  const HardCost cost{&map, &chain, hard.tau, params.delta};
  HardPlan out{plan_bidirectional(cost, start, goal, params, chain, rng), {}, false};
  if (out.result.planned) {
    out.path = out.result.planned->path;
    out.found = true;
    return out;
  }
  const Tree& tree = out.result.start_tree;
  int nearest = 0;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < tree.size(); ++i) {
    const double d = (tree[i].config - goal).squaredNorm();
    if (d < best) {
      best = d;
      nearest = static_cast<int>(i);
    }
  }
  for (int id : tree.branch(nearest)) out.path.via.push_back(tree[static_cast<std::size_t>(id)].config);
  if (out.path.via.size() == 1) out.path.via.push_back(start);
  return out;
}

/// Epsilon-greedy walk: each step of length `step` heads for the goal with
/// probability epsilon, otherwise in a uniformly random joint-space direction.
/// Stops once within one step of the goal, which then becomes the last via
/// point; otherwise the path ends wherever max_steps left it. Never looks at
/// the failure map.
inline Path epsilon_plan(const JointConfig& current, const JointConfig& goal,
                         const EpsilonParams& params, const KinematicChain& chain, Rng& rng) {
  params.validate();
  Path p;
  p.via.push_back(current);
  JointConfig c = current;
  for (int s = 0; s < params.max_steps; ++s) {
    const JointConfig to_goal = goal - c;
    const double d = to_goal.norm();
    if (d <= params.step) {
      p.via.push_back(goal);
      return p;
    }
    JointConfig dir;
    if (rng.uniform() < params.epsilon) {
      dir = to_goal / d;
    } else {
      do {
        for (int i = 0; i < kNumJoints; ++i) dir[i] = rng.normal();
      } while (dir.norm() == 0.0);
      dir.normalize();
    }
    const JointConfig next = chain.clamp(c + params.step * dir);
    if ((next - c).squaredNorm() == 0.0) continue;
    c = next;
    p.via.push_back(c);
  }
  if ((goal - c).norm() <= params.step && (goal - c).squaredNorm() != 0.0) p.via.push_back(goal);
  if (p.via.size() == 1) p.via.push_back(current);
  return p;
}

}  // namespace probdis
