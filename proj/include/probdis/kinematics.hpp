#pragma once

#include <Eigen/Dense>
#include <Eigen/Geometry>

#include <algorithm>
#include <array>
#include <cassert>
#include <cmath>
#include <numbers>
#include <optional>
#include <stdexcept>

namespace probdis {

inline constexpr int kNumJoints = 7;

/// Joint angles in radians; the point the planner moves through.
using JointConfig = Eigen::Matrix<double, kNumJoints, 1>;

/// Scalar-first unit quaternion (w, x, y, z). Normalized on construction.
class UnitQuaternion {
 public:
  UnitQuaternion() = default;
  UnitQuaternion(double w, double x, double y, double z) : q_(w, x, y, z) {
    const double n = q_.norm();
    if (!(n > 0.0) || !std::isfinite(n)) {
      throw std::invalid_argument("quaternion must have nonzero finite norm");
    }
    q_.coeffs() /= n;
  }
  explicit UnitQuaternion(const Eigen::Quaterniond& q)
      : UnitQuaternion(q.w(), q.x(), q.y(), q.z()) {}

  double w() const { return q_.w(); }
  double x() const { return q_.x(); }
  double y() const { return q_.y(); }
  double z() const { return q_.z(); }

  const Eigen::Quaterniond& eigen() const { return q_; }
  Eigen::Matrix3d rotation() const { return q_.toRotationMatrix(); }

  double dot(const UnitQuaternion& o) const { return q_.coeffs().dot(o.q_.coeffs()); }

  static UnitQuaternion identity() { return {}; }

 private:
  Eigen::Quaterniond q_ = Eigen::Quaterniond::Identity();
};

/// Normalized geodesic distance on rotations, in [0, 1].
/// Zero for q and -q; one for rotations half a turn apart.
inline double quat_geodesic(const UnitQuaternion& q1, const UnitQuaternion& q2) {
  const double d = std::clamp(std::abs(q1.dot(q2)), 0.0, 1.0);
  return (2.0 / std::numbers::pi) * std::acos(d);
}

enum class ChainKind { planar, spatial };

/// End-effector pose. Planar poses keep z = 0 and carry no orientation.
struct TaskPose {
  Eigen::Vector3d position = Eigen::Vector3d::Zero();
  int dim = 3;
  std::optional<UnitQuaternion> orientation;
};

struct JointLimit {
  double lo = -std::numbers::pi;
  double hi = std::numbers::pi;
};

enum class Axis { x, y, z };

/// Serial 7-joint chain.
///
/// Planar chains rotate every joint about the plane normal and `lengths` are
/// the link lengths. Spatial chains apply, per joint, a rotation about
/// `axes[i]` followed by a translation of `lengths[i]` along the local z axis,
/// so zero offsets are allowed there as long as the chain has positive reach.
struct KinematicChain {
  ChainKind kind = ChainKind::planar;
  std::array<double, kNumJoints> lengths{};
  std::array<Axis, kNumJoints> axes{};
  std::array<JointLimit, kNumJoints> limits{};

  double reach() const {
    double r = 0.0;
    for (double l : lengths) r += l;
    return r;
  }

  void validate() const {
    for (int i = 0; i < kNumJoints; ++i) {
      const double l = lengths[i];
      if (!std::isfinite(l) || l < 0.0 || (kind == ChainKind::planar && l <= 0.0)) {
        throw std::invalid_argument("link lengths must be positive");
      }
      if (!(limits[i].lo <= limits[i].hi)) {
        throw std::invalid_argument("joint limit lo must not exceed hi");
      }
    }
    if (!(reach() > 0.0)) throw std::invalid_argument("chain has zero reach");
  }

  bool within_limits(const JointConfig& c, double tol = 1e-12) const {
    for (int i = 0; i < kNumJoints; ++i) {
      if (c[i] < limits[i].lo - tol || c[i] > limits[i].hi + tol) return false;
    }
    return true;
  }

  JointConfig clamp(JointConfig c) const {
    for (int i = 0; i < kNumJoints; ++i) c[i] = std::clamp(c[i], limits[i].lo, limits[i].hi);
    return c;
  }

  /// Seven equal links of total length `total`, every joint limited to ±π.
  static KinematicChain planar_arm(double total = 1.0) {
    KinematicChain ch;
    ch.kind = ChainKind::planar;
    ch.lengths.fill(total / kNumJoints);
    ch.axes.fill(Axis::z);
    ch.limits.fill(JointLimit{-std::numbers::pi, std::numbers::pi});
    return ch;
  }

  /// LBR iiwa R820 geometry: shoulder at 0.36 m, elbow 0.42 m above it,
  /// wrist 0.40 m further, flange 0.126 m past the wrist.
  static KinematicChain iiwa() {
    KinematicChain ch;
    ch.kind = ChainKind::spatial;
    ch.lengths = {0.36, 0.0, 0.42, 0.0, 0.40, 0.0, 0.126};
    ch.axes = {Axis::z, Axis::y, Axis::z, Axis::y, Axis::z, Axis::y, Axis::z};
    constexpr double deg = std::numbers::pi / 180.0;
    for (int i = 0; i < kNumJoints; ++i) {
      const double lim = (i % 2 == 0 ? 170.0 : 120.0) * deg;
      ch.limits[i] = {-lim, lim};
    }
    return ch;
  }
};

namespace detail {

inline Eigen::Matrix3d axis_rotation(Axis axis, double angle) {
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  Eigen::Matrix3d r;
  switch (axis) {
    case Axis::x: r << 1, 0, 0, 0, c, -s, 0, s, c; break;
    case Axis::y: r << c, 0, s, 0, 1, 0, -s, 0, c; break;
    case Axis::z: r << c, -s, 0, s, c, 0, 0, 0, 1; break;
  }
  return r;
}

}  // namespace detail

/// Position-only forward kinematics (hot path for cost evaluation).
inline Eigen::Vector3d fk_position(const KinematicChain& chain, const JointConfig& c) {
  if (chain.kind == ChainKind::planar) {
    double angle = 0.0;
    double x = 0.0;
    double y = 0.0;
    for (int i = 0; i < kNumJoints; ++i) {
      angle += c[i];
      x += chain.lengths[i] * std::cos(angle);
      y += chain.lengths[i] * std::sin(angle);
    }
    return {x, y, 0.0};
  }
  Eigen::Matrix3d rot = Eigen::Matrix3d::Identity();
  Eigen::Vector3d pos = Eigen::Vector3d::Zero();
  for (int i = 0; i < kNumJoints; ++i) {
    rot = rot * detail::axis_rotation(chain.axes[i], c[i]);
    pos += rot.col(2) * chain.lengths[i];
  }
  return pos;
}

inline TaskPose fk(const KinematicChain& chain, const JointConfig& c) {
  assert(chain.within_limits(c, 1e-9));
  TaskPose pose;
  if (chain.kind == ChainKind::planar) {
    pose.position = fk_position(chain, c);
    pose.dim = 2;
    return pose;
  }
  Eigen::Matrix3d rot = Eigen::Matrix3d::Identity();
  Eigen::Vector3d pos = Eigen::Vector3d::Zero();
  for (int i = 0; i < kNumJoints; ++i) {
    rot = rot * detail::axis_rotation(chain.axes[i], c[i]);
    pos += rot.col(2) * chain.lengths[i];
  }
  pose.position = pos;
  pose.dim = 3;
  pose.orientation = UnitQuaternion(Eigen::Quaterniond(rot));
  return pose;
}

/// (1 - t) a + t b, clamped to the chain's limits.
inline JointConfig interpolate(const KinematicChain& chain, const JointConfig& a,
                               const JointConfig& b, double t) {
  return chain.clamp((1.0 - t) * a + t * b);
}

/// Walks the end effector along the joint-space segment a -> b at t = k / n,
/// k = 1..n. Angles are linear in t, so each step rotates the stored
/// (cos, sin) pairs by a fixed increment instead of calling sincos; every
/// few steps they are recomputed exactly to stop drift.
class SegmentWalker {
 public:
  SegmentWalker(const KinematicChain& chain, const JointConfig& a, const JointConfig& b, std::size_t n)
      : chain_(chain), n_(n) {
    double acc_a = 0.0;
    double acc_d = 0.0;
    for (int i = 0; i < kNumJoints; ++i) {
      // Planar links point along the running sum of joint angles.
      if (chain.kind == ChainKind::planar) {
        acc_a += a[i];
        acc_d += b[i] - a[i];
        start_[i] = acc_a;
        span_[i] = acc_d;
      } else {
        start_[i] = a[i];
        span_[i] = b[i] - a[i];
      }
      const double step = span_[i] / static_cast<double>(n);
      step_cos_[i] = std::cos(step);
      step_sin_[i] = std::sin(step);
    }
  }

  std::size_t count() const { return n_; }

  /// Advances to the next sample; false once all n have been produced.
  bool next() {
    if (k_ >= n_) return false;
    ++k_;
    if ((k_ - 1) % kReanchor == 0) {
      const double t = static_cast<double>(k_) / static_cast<double>(n_);
      for (int i = 0; i < kNumJoints; ++i) {
        const double angle = start_[i] + t * span_[i];
        cos_[i] = std::cos(angle);
        sin_[i] = std::sin(angle);
      }
    } else {
      for (int i = 0; i < kNumJoints; ++i) {
        const double c = cos_[i] * step_cos_[i] - sin_[i] * step_sin_[i];
        const double s = sin_[i] * step_cos_[i] + cos_[i] * step_sin_[i];
        cos_[i] = c;
        sin_[i] = s;
      }
    }
    return true;
  }

  double t() const { return static_cast<double>(k_) / static_cast<double>(n_); }

  Eigen::Vector3d position() const {
    if (chain_.kind == ChainKind::planar) {
      double x = 0.0;
      double y = 0.0;
      for (int i = 0; i < kNumJoints; ++i) {
        x += chain_.lengths[i] * cos_[i];
        y += chain_.lengths[i] * sin_[i];
      }
      return {x, y, 0.0};
    }
    Eigen::Matrix3d rot;
    return spatial(rot);
  }

  TaskPose pose() const {
    TaskPose out;
    if (chain_.kind == ChainKind::planar) {
      out.position = position();
      out.dim = 2;
      return out;
    }
    Eigen::Matrix3d rot;
    out.position = spatial(rot);
    out.dim = 3;
    out.orientation = UnitQuaternion(Eigen::Quaterniond(rot));
    return out;
  }

 private:
  static constexpr std::size_t kReanchor = 16;

  Eigen::Vector3d spatial(Eigen::Matrix3d& rot) const {
    rot.setIdentity();
    Eigen::Vector3d pos = Eigen::Vector3d::Zero();
    for (int i = 0; i < kNumJoints; ++i) {
      const double c = cos_[i];
      const double s = sin_[i];
      Eigen::Matrix3d r;
      switch (chain_.axes[i]) {
        case Axis::x: r << 1, 0, 0, 0, c, -s, 0, s, c; break;
        case Axis::y: r << c, 0, s, 0, 1, 0, -s, 0, c; break;
        case Axis::z: r << c, -s, 0, s, c, 0, 0, 0, 1; break;
      }
      rot = rot * r;
      pos += rot.col(2) * chain_.lengths[i];
    }
    return pos;
  }

  const KinematicChain& chain_;
  std::size_t n_;
  std::size_t k_ = 0;
  std::array<double, kNumJoints> start_{}, span_{}, step_cos_{}, step_sin_{}, cos_{}, sin_{};
};

}  // namespace probdis
