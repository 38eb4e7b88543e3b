#pragma once

// A planar arm with only its first two joints free, one failure record between
// start and goal, and an exhaustive grid search over the two free angles.

#include "probdis/planner.hpp"

#include <functional>
#include <numbers>
#include <queue>
#include <vector>

namespace toy {

using namespace probdis;

inline constexpr int kGrid = 101;

inline KinematicChain two_joint_arm() {
  KinematicChain ch = KinematicChain::planar_arm();
  ch.lengths = {0.5, 0.1, 0.1, 0.1, 0.1, 0.05, 0.05};
  for (int i = 2; i < kNumJoints; ++i) ch.limits[i] = {0.0, 0.0};
  return ch;
}

inline double grid_angle(int k) { return -std::numbers::pi + 2.0 * std::numbers::pi * k / (kGrid - 1); }

inline JointConfig grid_config(int i, int j) {
  JointConfig c = JointConfig::Zero();
  c[0] = grid_angle(i);
  c[1] = grid_angle(j);
  return c;
}

struct Problem {
  KinematicChain chain = two_joint_arm();
  JointConfig start = grid_config(30, 60);
  JointConfig goal = grid_config(70, 60);
  int si = 30, sj = 60, gi = 70, gj = 60;
  FailureMap map;

  Problem() {
    // Blocked halfway along the straight joint-space move, heading for the goal.
    const JointConfig mid = 0.5 * (start + goal);
    const Eigen::Vector3d v = fk_position(chain, goal) - fk_position(chain, start);
    map = FailureMap().with(fk_position(chain, mid), v, 2);
  }

  double segment_hazard(const JointConfig& a, const JointConfig& b, double delta = 0.04) const {
    return segment_failure(map, chain, a, b, {delta, CombineMode::survival}).hazard();
  }

  double path_hazard(const Path& p, double delta = 0.04) const {
    double h = 0.0;
    for (std::size_t i = 0; i + 1 < p.size(); ++i) h += segment_hazard(p.via[i], p.via[i + 1], delta);
    return h;
  }
};

/// Minimum total hazard over 8-connected grid paths from start to goal (Dijkstra).
inline double grid_oracle(const Problem& pr, double delta = 0.04) {
  std::vector<double> dist(kGrid * kGrid, std::numeric_limits<double>::infinity());
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<Item>> open;
  const int src = pr.si * kGrid + pr.sj;
  dist[src] = 0.0;
  open.push({0.0, src});
  while (!open.empty()) {
    const auto [d, u] = open.top();
    open.pop();
    if (d > dist[u]) continue;
    const int i = u / kGrid;
    const int j = u % kGrid;
    if (i == pr.gi && j == pr.gj) return d;
    for (int di = -1; di <= 1; ++di) {
      for (int dj = -1; dj <= 1; ++dj) {
        const int a = i + di;
        const int b = j + dj;
        if ((di == 0 && dj == 0) || a < 0 || b < 0 || a >= kGrid || b >= kGrid) continue;
        const double w = pr.segment_hazard(grid_config(i, j), grid_config(a, b), delta);
        if (d + w < dist[a * kGrid + b]) {
          dist[a * kGrid + b] = d + w;
          open.push({d + w, a * kGrid + b});
        }
      }
    }
  }
  return dist[pr.gi * kGrid + pr.gj];
}

}  // namespace toy
