#pragma once

#include "probdis/kinematics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <iomanip>
#include <istream>
#include <limits>
#include <numbers>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace probdis {

/// One blocked movement: where the end effector stopped, the unit direction it
/// was moving in, and (orientation mode only) its orientation at that moment.
struct FailureRecord {
  Eigen::Vector3d position = Eigen::Vector3d::Zero();
  Eigen::Vector3d direction = Eigen::Vector3d::UnitX();
  int dim = 3;
  std::optional<UnitQuaternion> orientation;
};

enum class CombineMode {
  survival,        ///< 1 - prod (1 - p_k)^(w_k)
  literal_product  ///< exp sum log p_k
};

struct PathFailureParams {
  double delta = 0.04;
  CombineMode combine = CombineMode::survival;

  void validate() const {
    if (!(delta > 0.0)) throw std::invalid_argument("delta must be positive");
  }
};

inline constexpr double kDefaultCFail = 100.0;
inline constexpr double kMaxSampleFailure = 1.0 - 1e-12;

/// Failure probability contributed by a single record at `pose`.
///
/// The angle is measured between the blocked direction and the vector from the
/// pose to the blocked point, so points past the blockage (along the motion)
/// score high and points on the approach side score low. At the blocked point
/// itself the angle is taken as pi.
inline double prob_fail_single(const TaskPose& pose, const FailureRecord& f, double c_fail) {
  const Eigen::Vector3d to_fail = f.position - pose.position;
  const double dist_sq = to_fail.squaredNorm();
  double alpha = std::numbers::pi;
  if (dist_sq > 0.0) {
    const double cos_a = std::clamp(f.direction.dot(to_fail) / std::sqrt(dist_sq), -1.0, 1.0);
    alpha = std::acos(cos_a);
  }
  const double a = alpha / std::numbers::pi;
  double p = a * a * a / (1.0 + dist_sq * c_fail);
  if (pose.orientation && f.orientation) {
    p *= 1.0 - 0.5 * quat_geodesic(*pose.orientation, *f.orientation);
  }
  return p;
}

/// The probability map: every blocked movement observed so far plus C_FAIL.
///
/// Values are immutable in practice; `with` returns an extended copy so a
/// planning episode can hold a stable snapshot.
class FailureMap {
 public:
  explicit FailureMap(double c_fail = kDefaultCFail) : c_fail_(c_fail) {
    if (!(c_fail > 0.0) || !std::isfinite(c_fail)) {
      throw std::invalid_argument("C_FAIL must be positive");
    }
    set_cutoff(5.0 / std::sqrt(c_fail));
  }

  double c_fail() const { return c_fail_; }
  std::size_t size() const { return records_.size(); }
  bool empty() const { return records_.empty(); }
  const std::vector<FailureRecord>& records() const { return records_; }
  const FailureRecord& operator[](std::size_t i) const { return records_[i]; }

  /// True once any record carries an orientation; costs then need fk orientation.
  bool oriented() const { return oriented_; }

  /// Bumped on every append; identifies a snapshot.
  std::uint64_t version() const { return records_.size(); }

  double cutoff_radius() const { return cutoff_; }

  /// Records farther than `r` are only scanned when nothing nearer exceeds
  /// the largest value they could contribute.
  void set_cutoff(double r) {
    if (!(r > 0.0)) throw std::invalid_argument("cutoff radius must be positive");
    cutoff_ = r;
    cutoff_sq_ = r * r;
    cutoff_bound_ = 1.0 / (1.0 + cutoff_sq_ * c_fail_);
  }

  FailureMap with(const Eigen::Vector3d& position, const Eigen::Vector3d& direction, int dim,
                  std::optional<UnitQuaternion> orientation = std::nullopt) const {
    const double n = direction.norm();
    if (!(n > 0.0) || !std::isfinite(n)) {
      throw std::invalid_argument("failure direction must be nonzero");
    }
    FailureMap out = *this;
    FailureRecord rec;
    rec.position = position;
    rec.direction = direction / n;
    rec.dim = dim;
    rec.orientation = orientation;
    out.oriented_ = oriented_ || orientation.has_value();
    out.records_.push_back(std::move(rec));
    return out;
  }

  /// Maximum over records; zero when the map is empty. Exact: a record is
  /// skipped only when an upper bound on its value cannot beat the best so far.
  double prob_fail(const TaskPose& pose) const {
    const std::size_t n = records_.size();
    if (n == 0) return 0.0;

    // Per record: squared distance and a cheap upper bound on its value.
    // acos(x) = 2 asin(sqrt((1 - x) / 2)) and asin(y) <= pi y / 2 on [0, 1],
    // so alpha / pi <= sqrt((1 - cos alpha) / 2).
    constexpr std::size_t kStack = 64;
    std::array<double, 2 * kStack> local;
    std::vector<double> heap;
    double* dist = local.data();
    if (n > kStack) {
      heap.resize(2 * n);
      dist = heap.data();
    }
    double* bound = dist + n;
    std::size_t first = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const FailureRecord& r = records_[i];
      const Eigen::Vector3d to_fail = r.position - pose.position;
      const double d = to_fail.squaredNorm();
      double h = 1.0;
      if (d > 0.0) h = std::clamp(0.5 * (1.0 - r.direction.dot(to_fail) / std::sqrt(d)), 0.0, 1.0);
      dist[i] = d;
      bound[i] = h * std::sqrt(h) / (1.0 + d * c_fail_) * (1.0 + 1e-9);
      if (bound[i] > bound[first]) first = i;
    }
    double best = prob_fail_single(pose, records_[first], c_fail_);

    bool skipped = false;
    for (std::size_t i = 0; i < n; ++i) {
      if (i == first) continue;
      if (dist[i] > cutoff_sq_) {
        skipped = true;
        continue;
      }
      if (bound[i] > best) best = std::max(best, prob_fail_single(pose, records_[i], c_fail_));
    }
    if (!skipped || best > cutoff_bound_) return best;

    for (std::size_t i = 0; i < n; ++i) {
      if (i == first || dist[i] <= cutoff_sq_) continue;
      if (bound[i] > best) best = std::max(best, prob_fail_single(pose, records_[i], c_fail_));
    }
    return best;
  }

  /// Plain maximum over every record, no pruning.
  double prob_fail_full_scan(const TaskPose& pose) const {
    double best = 0.0;
    for (const auto& r : records_) best = std::max(best, prob_fail_single(pose, r, c_fail_));
    return best;
  }

 private:
  std::vector<FailureRecord> records_;
  double c_fail_;
  double cutoff_ = 0.0;
  double cutoff_sq_ = 0.0;
  double cutoff_bound_ = 0.0;
  bool oriented_ = false;
};

inline double prob_fail(const FailureMap& map, const TaskPose& pose) { return map.prob_fail(pose); }

inline FailureMap record_failure(const FailureMap& map, const Eigen::Vector3d& position,
                                 const Eigen::Vector3d& direction, int dim,
                                 std::optional<UnitQuaternion> orientation = std::nullopt) {
  return map.with(position, direction, dim, orientation);
}

/// Folds per-sample failure probabilities into one path failure probability.
/// `weights` are the sample spacings divided by delta.
inline double combine_samples(std::span<const double> probs, std::span<const double> weights,
                              CombineMode mode) {
  double acc = 0.0;
  if (mode == CombineMode::literal_product) {
    for (double p : probs) acc += std::log(p);
    return std::exp(acc);
  }
  for (std::size_t k = 0; k < probs.size(); ++k) {
    acc += weights[k] * std::log1p(-std::min(probs[k], kMaxSampleFailure));
  }
  return -std::expm1(acc);
}

/// Accumulated evidence along a sampled segment.
struct SegmentFailure {
  double log_term = 0.0;  ///< sum of w log(1-p), or sum of log p in literal mode
  std::size_t samples = 0;
  bool aborted = false;

  double probability(CombineMode mode) const {
    if (mode == CombineMode::literal_product) return samples == 0 ? 0.0 : std::exp(log_term);
    return -std::expm1(log_term);
  }

  /// -log(1 - P) in survival mode. Unlike P it does not round to 1 on long
  /// or hazardous segments, so it keeps ranking them.
  double hazard() const { return -log_term; }
};

/// Samples the joint-space segment a -> b at spacing at most delta (end point
/// included, start excluded) and accumulates failure evidence.
///
/// In survival mode the hazard -log(1 - P) only grows with each sample, so
/// evaluation stops once it reaches `abort_hazard`; the result is then a lower
/// bound that is already at least that large.
inline SegmentFailure segment_failure(const FailureMap& map, const KinematicChain& chain,
                                      const JointConfig& a, const JointConfig& b,
                                      const PathFailureParams& params,
                                      double abort_hazard = std::numeric_limits<double>::infinity()) {
  SegmentFailure out;
  const double length = (b - a).norm();
  if (length <= 0.0) return out;
  const auto n = static_cast<std::size_t>(std::ceil(length / params.delta - 1e-9));
  const std::size_t count = std::max<std::size_t>(n, 1);
  const double weight = (length / static_cast<double>(count)) / params.delta;
  const bool survival = params.combine == CombineMode::survival;
  const bool can_abort = survival && std::isfinite(abort_hazard);
  if (map.empty()) {
    out.samples = count;
    if (!survival) out.log_term = -std::numeric_limits<double>::infinity();
    return out;
  }
  const bool need_orientation = map.oriented();

  SegmentWalker walk(chain, a, b, count);
  while (walk.next()) {
    TaskPose pose;
    if (need_orientation) {
      pose = walk.pose();
    } else {
      pose.position = walk.position();
      pose.dim = chain.kind == ChainKind::planar ? 2 : 3;
    }
    const double p = map.prob_fail(pose);
    if (survival) {
      out.log_term += weight * std::log1p(-std::min(p, kMaxSampleFailure));
    } else {
      out.log_term += std::log(p);
    }
    ++out.samples;
    if (can_abort && -out.log_term >= abort_hazard && out.samples < count) {
      out.aborted = true;
      return out;
    }
  }
  return out;
}

/// Failure probability of a joint-space polyline.
inline double path_failure(const FailureMap& map, std::span<const JointConfig> path,
                           const KinematicChain& chain, const PathFailureParams& params) {
  if (path.size() < 2) throw std::invalid_argument("path needs at least two via points");
  double log_term = 0.0;
  std::size_t samples = 0;
  for (std::size_t i = 0; i + 1 < path.size(); ++i) {
    const SegmentFailure s = segment_failure(map, chain, path[i], path[i + 1], params);
    log_term += s.log_term;
    samples += s.samples;
  }
  SegmentFailure total{log_term, samples, false};
  return total.probability(params.combine);
}

/// Survival-consistent composition of two failure probabilities.
inline double compose_failure(double a, double b) { return 1.0 - (1.0 - a) * (1.0 - b); }

/// Hazard h = -log(1 - P) and back; composition becomes addition.
inline double hazard_from_probability(double p) { return -std::log1p(-p); }
inline double probability_from_hazard(double h) { return -std::expm1(-h); }

// Text form: a header line, then one record per line with the position and
// direction (2 or 3 fields each) followed by w x y z when oriented.

inline void write_failure_map(std::ostream& os, const FailureMap& map, int dim) {
  os << "# probdis-failure-map v1 dim=" << dim << " c_fail=" << std::setprecision(17)
     << map.c_fail() << " count=" << map.size() << '\n';
  for (const auto& r : map.records()) {
    for (int i = 0; i < dim; ++i) os << (i ? " " : "") << r.position[i];
    for (int i = 0; i < dim; ++i) os << ' ' << r.direction[i];
    if (r.orientation) {
      os << ' ' << r.orientation->w() << ' ' << r.orientation->x() << ' ' << r.orientation->y()
         << ' ' << r.orientation->z();
    }
    os << '\n';
  }
}

inline FailureMap read_failure_map(std::istream& is, int* dim_out = nullptr) {
  std::string header;
  if (!std::getline(is, header) || header.rfind("# probdis-failure-map v1", 0) != 0) {
    throw std::runtime_error("not a failure map dump");
  }
  int dim = 0;
  double c_fail = 0.0;
  {
    const auto dpos = header.find("dim=");
    const auto cpos = header.find("c_fail=");
    if (dpos == std::string::npos || cpos == std::string::npos) {
      throw std::runtime_error("failure map header missing dim or c_fail");
    }
    dim = std::stoi(header.substr(dpos + 4));
    c_fail = std::stod(header.substr(cpos + 7));
  }
  if (dim != 2 && dim != 3) throw std::runtime_error("failure map dim must be 2 or 3");
  FailureMap map(c_fail);
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::vector<double> v;
    double x;
    while (ls >> x) v.push_back(x);
    const std::size_t base = static_cast<std::size_t>(2 * dim);
    if (v.size() != base && v.size() != base + 4) {
      throw std::runtime_error("malformed failure record: " + line);
    }
    Eigen::Vector3d p = Eigen::Vector3d::Zero();
    Eigen::Vector3d d = Eigen::Vector3d::Zero();
    for (int i = 0; i < dim; ++i) {
      p[i] = v[i];
      d[i] = v[dim + i];
    }
    std::optional<UnitQuaternion> q;
    if (v.size() == base + 4) q = UnitQuaternion(v[base], v[base + 1], v[base + 2], v[base + 3]);
    map = map.with(p, d, dim, q);
  }
  if (dim_out) *dim_out = dim;
  return map;
}

}  // namespace probdis
