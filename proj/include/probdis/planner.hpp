#pragma once

#include "probdis/failure_map.hpp"
#include "probdis/kinematics.hpp"
#include "probdis/rng.hpp"

#include <algorithm>
#include <cstdint>
#include <deque>
#include <limits>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

namespace probdis {

struct PlannerParams {
  int k_iter = 100;
  double delta = 0.04;
  double p_goal = 0.1;
  int n_rand = 100;
  double eta = 0.3;
  int k_rewire = 10;
  std::uint64_t rng_seed = 0;
  /// Branch-and-bound in nearest-node and bridge search. Does not change results.
  bool prune = true;

  void validate() const {
    if (k_iter < 0) throw std::invalid_argument("k_iter must be non-negative");
    if (!(p_goal >= 0.0 && p_goal <= 1.0)) throw std::invalid_argument("p_goal must lie in [0,1]");
    if (n_rand < 1) throw std::invalid_argument("n_rand must be at least 1");
    if (!(delta > 0.0)) throw std::invalid_argument("delta must be positive");
    if (!(eta > 0.0)) throw std::invalid_argument("eta must be positive");
    if (k_rewire < 0) throw std::invalid_argument("k_rewire must be non-negative");
  }

  PathFailureParams path_params() const { return {delta, CombineMode::survival}; }
};

/// Ordered via points in joint space.
struct Path {
  std::vector<JointConfig> via;

  std::size_t size() const { return via.size(); }
  const JointConfig& front() const { return via.front(); }
  const JointConfig& back() const { return via.back(); }

  double joint_length() const {
    double l = 0.0;
    for (std::size_t i = 0; i + 1 < via.size(); ++i) l += (via[i + 1] - via[i]).norm();
    return l;
  }

  /// Task-space moves (x_start, x_end) induced by consecutive via points.
  std::vector<std::pair<TaskPose, TaskPose>> moves(const KinematicChain& chain) const {
    std::vector<std::pair<TaskPose, TaskPose>> out;
    for (std::size_t i = 0; i + 1 < via.size(); ++i) {
      out.emplace_back(fk(chain, via[i]), fk(chain, via[i + 1]));
    }
    return out;
  }
};

struct TreeNode {
  JointConfig config;
  Eigen::Vector3d position;  // fk position, cached for task-space distances
  int parent = -1;
  // Costs are in the tree's cost units: survival hazard for the probabilistic
  // planner, joint-space length for the threshold baseline.
  double edge_cost = 0.0;  // edge to the parent
  double acc_cost = 0.0;   // between this node and the root
  std::vector<int> children;
};

/// RRT graph. A tree grown from the goal is traversed toward its root, so its
/// edges are costed child -> parent; a start tree is costed parent -> child.
class Tree {
 public:
  enum class Direction { from_root, toward_root };

  Tree(const JointConfig& root, const Eigen::Vector3d& root_position,
       Direction dir = Direction::from_root)
      : dir_(dir) {
    nodes_.push_back(TreeNode{root, root_position, -1, 0.0, 0.0, {}});
  }

  Direction direction() const { return dir_; }
  std::size_t size() const { return nodes_.size(); }
  const TreeNode& operator[](std::size_t i) const { return nodes_[i]; }
  const std::vector<TreeNode>& nodes() const { return nodes_; }
  const JointConfig& root() const { return nodes_.front().config; }

  /// Segment endpoints in travel order for an edge between `near_root` and `far`.
  std::pair<const JointConfig&, const JointConfig&> travel(const JointConfig& near_root,
                                                           const JointConfig& far) const {
    if (dir_ == Direction::from_root) return {near_root, far};
    return {far, near_root};
  }

  int add(const JointConfig& c, const Eigen::Vector3d& position, int parent, double edge_cost,
          double acc_cost) {
    const int id = static_cast<int>(nodes_.size());
    nodes_.push_back(TreeNode{c, position, parent, edge_cost, acc_cost, {}});
    nodes_[static_cast<std::size_t>(parent)].children.push_back(id);
    return id;
  }

  bool is_ancestor(int ancestor, int node) const {
    for (int n = node; n >= 0; n = nodes_[static_cast<std::size_t>(n)].parent) {
      if (n == ancestor) return true;
    }
    return false;
  }

  /// Moves `node` under `new_parent` and refreshes accumulated costs below it.
  template <typename Compose>
  void reparent(int node, int new_parent, double edge_cost, Compose compose) {
    auto& n = nodes_[static_cast<std::size_t>(node)];
    auto& siblings = nodes_[static_cast<std::size_t>(n.parent)].children;
    siblings.erase(std::find(siblings.begin(), siblings.end(), node));
    n.parent = new_parent;
    n.edge_cost = edge_cost;
    nodes_[static_cast<std::size_t>(new_parent)].children.push_back(node);
    std::deque<int> queue{node};
    while (!queue.empty()) {
      const int id = queue.front();
      queue.pop_front();
      auto& cur = nodes_[static_cast<std::size_t>(id)];
      cur.acc_cost = compose(nodes_[static_cast<std::size_t>(cur.parent)].acc_cost, cur.edge_cost);
      for (int ch : cur.children) queue.push_back(ch);
    }
  }

  std::vector<int> leaves() const {
    std::vector<int> out;
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      if (nodes_[i].children.empty()) out.push_back(static_cast<int>(i));
    }
    return out;
  }

  /// Node ids from the root down to `node`.
  std::vector<int> branch(int node) const {
    std::vector<int> ids;
    for (int n = node; n >= 0; n = nodes_[static_cast<std::size_t>(n)].parent) ids.push_back(n);
    std::reverse(ids.begin(), ids.end());
    return ids;
  }

  /// Single root, parents precede nothing cyclic, root cost zero, costs non-negative.
  bool check_invariants() const {
    if (nodes_.empty() || nodes_[0].parent != -1 || nodes_[0].acc_cost != 0.0) return false;
    for (std::size_t i = 1; i < nodes_.size(); ++i) {
      if (nodes_[i].parent < 0 || nodes_[i].acc_cost < 0.0) return false;
      std::size_t steps = 0;
      int n = static_cast<int>(i);
      while (n > 0) {
        n = nodes_[static_cast<std::size_t>(n)].parent;
        if (++steps > nodes_.size()) return false;
      }
      if (n != 0) return false;
    }
    return true;
  }

 private:
  Direction dir_;
  std::vector<TreeNode> nodes_;
};

/// Minimum-failure-probability costs. Segments are scored by their survival
/// hazard -log(1 - P), so 1 - (1 - a)(1 - b) composition is a sum and the
/// ordering matches P without rounding to 1 on long paths.
struct ProbabilisticCost {
  const FailureMap* map;
  const KinematicChain* chain;
  double delta;

  double segment(const JointConfig& a, const JointConfig& b,
                 double abort_at = std::numeric_limits<double>::infinity()) const {
    return segment_failure(*map, *chain, a, b, {delta, CombineMode::survival}, abort_at).hazard();
  }
  static double compose(double acc, double seg) { return acc + seg; }
  /// Largest segment cost that still lets acc_from + segment beat target.
  static double budget(double acc_from, double target) { return target - acc_from; }
  static double probability(double cost) { return probability_from_hazard(cost); }
};

/// Joint-space length, or +inf when any sample reaches the failure threshold.
struct HardCost {
  const FailureMap* map;
  const KinematicChain* chain;
  double tau;
  double delta;

  /// Closed threshold: a pose with prob_fail >= tau is forbidden.
  bool admissible(const JointConfig& c) const {
    TaskPose pose;
    if (map->oriented()) {
      pose = fk(*chain, chain->clamp(c));
    } else {
      pose.position = fk_position(*chain, c);
    }
    return map->prob_fail(pose) < tau;
  }

  double segment(const JointConfig& a, const JointConfig& b,
                 double abort_at = std::numeric_limits<double>::infinity()) const {
    const double length = (b - a).norm();
    if (length >= abort_at) return length;
    if (length <= 0.0) return admissible(b) ? 0.0 : std::numeric_limits<double>::infinity();
    const auto n = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::ceil(length / delta - 1e-9)));
    for (std::size_t k = 1; k <= n; ++k) {
      const double t = static_cast<double>(k) / static_cast<double>(n);
      if (!admissible(a + t * (b - a))) return std::numeric_limits<double>::infinity();
    }
    return length;
  }
  static double compose(double acc, double seg) { return acc + seg; }
  static double budget(double acc_from, double target) { return target - acc_from; }
};

inline JointConfig sample_uniform(const KinematicChain& chain, Rng& rng) {
  JointConfig c;
  for (int i = 0; i < kNumJoints; ++i) c[i] = rng.uniform(chain.limits[i].lo, chain.limits[i].hi);
  return c;
}

/// Task-space distance from fk(c) to the nearest tree node.
inline double tree_distance(const Tree& tree, const Eigen::Vector3d& position) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& n : tree.nodes()) best = std::min(best, (n.position - position).squaredNorm());
  return std::sqrt(best);
}

/// Index of the candidate farthest (in task space) from every tree node.
inline std::size_t farthest_candidate(const Tree& tree, std::span<const JointConfig> candidates,
                                      const KinematicChain& chain) {
  std::size_t arg = 0;
  double best = -1.0;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const double d = tree_distance(tree, fk_position(chain, candidates[i]));
    if (d > best) {
      best = d;
      arg = i;
    }
  }
  return arg;
}

/// Goal with probability p_goal, else the most isolated of n_rand uniform samples.
inline JointConfig random_configuration(const Tree& tree, const JointConfig& goal,
                                        const PlannerParams& params, const KinematicChain& chain,
                                        Rng& rng) {
  if (rng.uniform() < params.p_goal) return goal;
  std::vector<JointConfig> candidates;
  candidates.reserve(static_cast<std::size_t>(params.n_rand));
  for (int i = 0; i < params.n_rand; ++i) candidates.push_back(sample_uniform(chain, rng));
  return candidates[farthest_candidate(tree, candidates, chain)];
}

/// Node minimizing the segment cost to `c`; ties go to the smaller joint-space
/// distance, then the smaller index. Empty when every segment is infinite.
template <typename Cost>
std::optional<int> closest_configuration(const Tree& tree, const JointConfig& c, const Cost& cost,
                                         const PlannerParams& params) {
  std::vector<std::pair<double, int>> order;
  order.reserve(tree.size());
  for (std::size_t i = 0; i < tree.size(); ++i) {
    order.emplace_back((tree[i].config - c).squaredNorm(), static_cast<int>(i));
  }
  std::sort(order.begin(), order.end());

  std::optional<int> arg;
  double best = std::numeric_limits<double>::infinity();
  for (const auto& [d, id] : order) {
    const auto [from, to] = tree.travel(tree[static_cast<std::size_t>(id)].config, c);
    const double s = cost.segment(from, to, params.prune ? best : std::numeric_limits<double>::infinity());
    if (s < best) {
      best = s;
      arg = id;
      if (best <= 0.0) break;
    }
  }
  return arg;
}

inline JointConfig new_configuration(const JointConfig& c_rand, const JointConfig& c_near,
                                     double eta) {
  const JointConfig diff = c_rand - c_near;
  const double d = diff.norm();
  if (d <= eta) return c_rand;
  return c_near + diff * (eta / d);
}

struct Attachment {
  int parent;
  double edge;
  double acc;
};

/// RRT* parent choice: among the k_rewire joint-space neighbours of `c`, the
/// one giving the lowest accumulated cost, starting from `at`.
template <typename Cost>
void choose_parent(const Tree& tree, const JointConfig& c, const Cost& cost, const PlannerParams& params,
                   Attachment& at) {
  if (params.k_rewire <= 0) return;
  std::vector<std::pair<double, int>> order;
  order.reserve(tree.size());
  for (std::size_t i = 0; i < tree.size(); ++i) {
    order.emplace_back((tree[i].config - c).squaredNorm(), static_cast<int>(i));
  }
  const auto k = std::min<std::size_t>(static_cast<std::size_t>(params.k_rewire), order.size());
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), order.end());
  for (std::size_t j = 0; j < k; ++j) {
    const int n = order[j].second;
    if (n == at.parent) continue;
    const double acc_n = tree[static_cast<std::size_t>(n)].acc_cost;
    const double room = Cost::budget(acc_n, at.acc);
    if (!(room > 0.0)) continue;
    const auto [from, to] = tree.travel(tree[static_cast<std::size_t>(n)].config, c);
    const double seg = cost.segment(from, to, params.prune ? room : std::numeric_limits<double>::infinity());
    const double candidate = Cost::compose(acc_n, seg);
    if (candidate < at.acc) at = {n, seg, candidate};
  }
}

/// Reparents up to k_rewire joint-space neighbours of `node` through it when
/// that strictly lowers their accumulated cost.
template <typename Cost>
void rewire_neighbours(Tree& tree, int node, const Cost& cost, const PlannerParams& params) {
  if (params.k_rewire <= 0 || tree.size() < 3) return;
  const JointConfig& c = tree[static_cast<std::size_t>(node)].config;
  std::vector<std::pair<double, int>> order;
  for (std::size_t i = 0; i < tree.size(); ++i) {
    if (static_cast<int>(i) == node) continue;
    order.emplace_back((tree[i].config - c).squaredNorm(), static_cast<int>(i));
  }
  const auto k = std::min<std::size_t>(static_cast<std::size_t>(params.k_rewire), order.size());
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), order.end());

  for (std::size_t j = 0; j < k; ++j) {
    const int n = order[j].second;
    if (n == 0 || tree.is_ancestor(n, node)) continue;
    const double acc_new = tree[static_cast<std::size_t>(node)].acc_cost;
    const double target = tree[static_cast<std::size_t>(n)].acc_cost;
    const double room = Cost::budget(acc_new, target);
    if (!(room > 0.0)) continue;
    const auto [from, to] = tree.travel(c, tree[static_cast<std::size_t>(n)].config);
    const double seg = cost.segment(from, to, params.prune ? room : std::numeric_limits<double>::infinity());
    const double candidate = Cost::compose(acc_new, seg);
    if (candidate < target) tree.reparent(n, node, seg, [](double a, double b) { return Cost::compose(a, b); });
  }
}

/// Grows an RRT from `root` biased toward `target`: K rounds of sample,
/// nearest-by-cost, step, choose parent, insert, rewire.
template <typename Cost>
Tree grow_tree(const JointConfig& root, const JointConfig& target, const Cost& cost,
               const PlannerParams& params, const KinematicChain& chain, Rng& rng,
               Tree::Direction dir = Tree::Direction::from_root) {
  Tree tree(root, fk_position(chain, root), dir);
  for (int k = 0; k < params.k_iter; ++k) {
    const JointConfig c_rand = random_configuration(tree, target, params, chain, rng);
    const auto near = closest_configuration(tree, c_rand, cost, params);
    if (!near) continue;
    const JointConfig& c_near = tree[static_cast<std::size_t>(*near)].config;
    if ((c_rand - c_near).squaredNorm() == 0.0) continue;
    const JointConfig c_new = chain.clamp(new_configuration(c_rand, c_near, params.eta));
    const auto [from, to] = tree.travel(c_near, c_new);
    const double edge = cost.segment(from, to);
    if (!std::isfinite(edge)) continue;
    Attachment at{*near, edge, Cost::compose(tree[static_cast<std::size_t>(*near)].acc_cost, edge)};
    choose_parent(tree, c_new, cost, params, at);
    const int id = tree.add(c_new, fk_position(chain, c_new), at.parent, at.edge, at.acc);
    rewire_neighbours(tree, id, cost, params);
  }
  return tree;
}

/// Probabilistic RRT rooted at `start`.
inline Tree prob_rrt(const FailureMap& map, const JointConfig& start, const JointConfig& goal,
                     const PlannerParams& params, const KinematicChain& chain, Rng& rng,
                     Tree::Direction dir = Tree::Direction::from_root) {
  params.validate();
  const ProbabilisticCost cost{&map, &chain, params.delta};
  return grow_tree(start, goal, cost, params, chain, rng, dir);
}

inline Tree prob_rrt(const FailureMap& map, const JointConfig& start, const JointConfig& goal,
                     const PlannerParams& params, const KinematicChain& chain) {
  Rng rng(params.rng_seed);
  return prob_rrt(map, start, goal, params, chain, rng);
}

struct Bridge {
  int start_node = 0;
  int end_leaf = 0;
  double cost = 0.0;
};

/// For every leaf of the goal tree, the start-tree node with the cheapest
/// bridge segment (same tie rule as closest_configuration). Leaves with no
/// finite bridge are dropped.
template <typename Cost>
std::vector<Bridge> connect_trees(const Tree& start_tree, const Tree& end_tree, const Cost& cost,
                                  const PlannerParams& params, std::size_t* evaluations = nullptr) {
  std::vector<Bridge> out;
  std::size_t evals = 0;
  std::vector<std::pair<double, int>> order;
  for (int leaf : end_tree.leaves()) {
    const JointConfig& c = end_tree[static_cast<std::size_t>(leaf)].config;
    order.clear();
    for (std::size_t i = 0; i < start_tree.size(); ++i) {
      order.emplace_back((start_tree[i].config - c).squaredNorm(), static_cast<int>(i));
    }
    std::sort(order.begin(), order.end());
    double best = std::numeric_limits<double>::infinity();
    int arg = -1;
    for (const auto& [d, id] : order) {
      ++evals;
      const double s = cost.segment(start_tree[static_cast<std::size_t>(id)].config, c,
                                    params.prune ? best : std::numeric_limits<double>::infinity());
      if (s < best) {
        best = s;
        arg = id;
        if (best <= 0.0) break;
      }
    }
    if (arg >= 0 && std::isfinite(best)) out.push_back(Bridge{arg, leaf, best});
  }
  if (evaluations) *evaluations = evals;
  return out;
}

struct PlannedPath {
  Path path;
  double cost = 0.0;  // in the planner's cost units
};

/// Joins start-tree branch, bridge and goal-tree branch into via points.
inline Path assemble_path(const Tree& start_tree, const Tree& end_tree, const Bridge& b) {
  Path p;
  for (int id : start_tree.branch(b.start_node)) p.via.push_back(start_tree[static_cast<std::size_t>(id)].config);
  auto down = end_tree.branch(b.end_leaf);
  for (auto it = down.rbegin(); it != down.rend(); ++it) {
    const JointConfig& c = end_tree[static_cast<std::size_t>(*it)].config;
    if (p.via.empty() || (p.via.back() - c).squaredNorm() != 0.0) p.via.push_back(c);
  }
  if (p.via.size() == 1) p.via.push_back(p.via.front());
  return p;
}

/// Joint-space length from the root to `node` along tree edges.
inline double branch_length(const Tree& tree, int node) {
  double l = 0.0;
  for (int n = node; tree[static_cast<std::size_t>(n)].parent >= 0; n = tree[static_cast<std::size_t>(n)].parent) {
    const auto& cur = tree[static_cast<std::size_t>(n)];
    l += (cur.config - tree[static_cast<std::size_t>(cur.parent)].config).norm();
  }
  return l;
}

/// Cheapest assembled start-to-goal path over all bridges. Equal costs (the
/// norm on an empty map) go to the shorter path in joint space, then the
/// earlier bridge.
template <typename Cost>
std::optional<PlannedPath> best_path(const Tree& start_tree, const Tree& end_tree,
                                     std::span<const Bridge> bridges) {
  std::optional<PlannedPath> best;
  std::size_t arg = 0;
  double best_cost = std::numeric_limits<double>::infinity();
  double best_len = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < bridges.size(); ++i) {
    const auto& b = bridges[i];
    const double total = Cost::compose(
        Cost::compose(start_tree[static_cast<std::size_t>(b.start_node)].acc_cost, b.cost),
        end_tree[static_cast<std::size_t>(b.end_leaf)].acc_cost);
    if (total > best_cost) continue;
    const double len = branch_length(start_tree, b.start_node) +
                       (start_tree[static_cast<std::size_t>(b.start_node)].config -
                        end_tree[static_cast<std::size_t>(b.end_leaf)].config).norm() +
                       branch_length(end_tree, b.end_leaf);
    if (total < best_cost || len < best_len) {
      best_cost = total;
      best_len = len;
      arg = i;
    }
  }
  if (!std::isfinite(best_cost)) return best;
  best = PlannedPath{assemble_path(start_tree, end_tree, bridges[arg]), best_cost};
  return best;
}

struct PlanResult {
  std::optional<PlannedPath> planned;
  Tree start_tree;
  Tree end_tree;
  std::vector<Bridge> bridges;
};

/// Both trees, Connect, and the cheapest path.
template <typename Cost>
PlanResult plan_bidirectional(const Cost& cost, const JointConfig& start, const JointConfig& goal,
                              const PlannerParams& params, const KinematicChain& chain, Rng& rng) {
  params.validate();
  Tree start_tree = grow_tree(start, goal, cost, params, chain, rng, Tree::Direction::from_root);
  Tree end_tree = grow_tree(goal, start, cost, params, chain, rng, Tree::Direction::toward_root);
  auto bridges = connect_trees(start_tree, end_tree, cost, params);
  auto planned = best_path<Cost>(start_tree, end_tree, bridges);
  return PlanResult{std::move(planned), std::move(start_tree), std::move(end_tree), std::move(bridges)};
}

/// One probabilistic planning episode. Always yields a path.
inline PlanResult plan_probabilistic(const FailureMap& map, const JointConfig& start,
                                     const JointConfig& goal, const PlannerParams& params,
                                     const KinematicChain& chain, Rng& rng) {
  const ProbabilisticCost cost{&map, &chain, params.delta};
  return plan_bidirectional(cost, start, goal, params, chain, rng);
}

}  // namespace probdis
