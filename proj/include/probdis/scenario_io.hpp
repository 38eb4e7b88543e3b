#pragma once

#include "probdis/environments.hpp"

#include <json.hpp>

#include <fstream>
#include <stdexcept>
#include <string>

namespace probdis {

using json = nlohmann::ordered_json;

namespace detail {

inline json vec_json(const Eigen::Vector3d& v, int dim) {
  json a = json::array();
  for (int i = 0; i < dim; ++i) a.push_back(v[i]);
  return a;
}

inline Eigen::Vector3d json_vec(const json& a) {
  if (!a.is_array() || a.size() < 2 || a.size() > 3) throw std::runtime_error("expected a 2- or 3-vector");
  Eigen::Vector3d v = Eigen::Vector3d::Zero();
  for (std::size_t i = 0; i < a.size(); ++i) v[static_cast<int>(i)] = a[i].get<double>();
  return v;
}

inline json config_json(const JointConfig& c) {
  json a = json::array();
  for (int i = 0; i < kNumJoints; ++i) a.push_back(c[i]);
  return a;
}

inline JointConfig json_config(const json& a) {
  if (!a.is_array() || a.size() != kNumJoints) throw std::runtime_error("joint configuration needs 7 values");
  JointConfig c;
  for (int i = 0; i < kNumJoints; ++i) c[i] = a[static_cast<std::size_t>(i)].get<double>();
  return c;
}

inline json quat_json(const UnitQuaternion& q) { return json::array({q.w(), q.x(), q.y(), q.z()}); }

inline UnitQuaternion json_quat(const json& a) {
  if (!a.is_array() || a.size() != 4) throw std::runtime_error("quaternion needs w x y z");
  return UnitQuaternion(a[0].get<double>(), a[1].get<double>(), a[2].get<double>(), a[3].get<double>());
}

inline std::string_view axis_name(Axis a) {
  switch (a) {
    case Axis::x: return "x";
    case Axis::y: return "y";
    case Axis::z: return "z";
  }
  return "?";
}

inline Axis parse_axis(const std::string& s) {
  if (s == "x") return Axis::x;
  if (s == "y") return Axis::y;
  if (s == "z") return Axis::z;
  throw std::runtime_error("unknown axis: " + s);
}

}  // namespace detail

inline json chain_to_json(const KinematicChain& ch) {
  json j;
  j["kind"] = ch.kind == ChainKind::planar ? "planar" : "spatial";
  j["lengths"] = ch.lengths;
  json axes = json::array();
  for (Axis a : ch.axes) axes.push_back(detail::axis_name(a));
  j["axes"] = axes;
  json lim = json::array();
  for (const auto& l : ch.limits) lim.push_back(json::array({l.lo, l.hi}));
  j["limits"] = lim;
  return j;
}

inline KinematicChain chain_from_json(const json& j) {
  KinematicChain ch;
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "planar") {
    ch.kind = ChainKind::planar;
  } else if (kind == "spatial") {
    ch.kind = ChainKind::spatial;
  } else {
    throw std::runtime_error("unknown chain kind: " + kind);
  }
  const auto& lengths = j.at("lengths");
  const auto& axes = j.at("axes");
  const auto& limits = j.at("limits");
  if (lengths.size() != kNumJoints || axes.size() != kNumJoints || limits.size() != kNumJoints) {
    throw std::runtime_error("chain needs 7 lengths, axes and limits");
  }
  for (std::size_t i = 0; i < kNumJoints; ++i) {
    ch.lengths[i] = lengths[i].get<double>();
    ch.axes[i] = detail::parse_axis(axes[i].get<std::string>());
    ch.limits[i] = {limits[i].at(0).get<double>(), limits[i].at(1).get<double>()};
  }
  ch.validate();
  return ch;
}

inline json environment_to_json(const Environment& env) {
  json j;
  j["format"] = "probdis-scenario v1";
  j["mode"] = to_string(env.mode);
  j["chain"] = chain_to_json(env.chain);
  json obs = json::array();
  for (const auto& o : env.obstacles) {
    json jo;
    jo["kind"] = to_string(o.kind);
    jo["center"] = detail::vec_json(o.center, env.dim());
    jo["radius"] = o.radius;
    if (o.orientation) jo["orientation"] = detail::quat_json(*o.orientation);
    obs.push_back(jo);
  }
  j["obstacles"] = obs;
  j["start"] = detail::config_json(env.start);
  j["goal"] = detail::config_json(env.goal);
  j["exec"] = {{"s_col", env.exec.s_col},
               {"theta_col", env.exec.theta_col},
               {"d_dist", env.exec.d_dist},
               {"compliant", env.exec.compliant},
               {"joint_step", env.exec.joint_step}};
  return j;
}

inline Environment environment_from_json(const json& j) {
  Environment env;
  env.mode = parse_mode(j.at("mode").get<std::string>());
  env.chain = chain_from_json(j.at("chain"));
  const bool planar = env.chain.kind == ChainKind::planar;
  if (planar != (env.mode == EnvMode::planar2d)) throw std::runtime_error("chain kind does not match mode");
  for (const auto& jo : j.at("obstacles")) {
    Obstacle o;
    o.kind = parse_obstacle_kind(jo.at("kind").get<std::string>());
    o.center = detail::json_vec(jo.at("center"));
    o.radius = jo.at("radius").get<double>();
    if (!(o.radius > 0.0)) throw std::runtime_error("obstacle radius must be positive");
    if (jo.contains("orientation")) o.orientation = detail::json_quat(jo.at("orientation"));
    env.obstacles.push_back(o);
  }
  env.start = detail::json_config(j.at("start"));
  env.goal = detail::json_config(j.at("goal"));
  if (j.contains("exec")) {
    const auto& e = j.at("exec");
    env.exec.s_col = e.value("s_col", env.exec.s_col);
    env.exec.theta_col = e.value("theta_col", env.exec.theta_col);
    env.exec.d_dist = e.value("d_dist", env.exec.d_dist);
    env.exec.compliant = e.value("compliant", env.exec.compliant);
    env.exec.joint_step = e.value("joint_step", env.exec.joint_step);
  }
  return env;
}

inline std::string_view to_string(ExecutionOutcome::Status s) {
  switch (s) {
    case ExecutionOutcome::Status::reached_goal: return "reached_goal";
    case ExecutionOutcome::Status::blocked: return "blocked";
    case ExecutionOutcome::Status::stopped_short: return "stopped_short";
  }
  return "?";
}

/// Per-episode record of a trial: the executed path and what happened.
inline json trace_to_json(const TrialTrace& trace, const Method& method, const TrialResult& result, int dim) {
  json j;
  j["format"] = "probdis-trace v1";
  j["method"] = method.label();
  j["seed"] = result.seed;
  j["success"] = result.success;
  j["paths_executed"] = result.paths_executed;
  json eps = json::array();
  for (std::size_t i = 0; i < trace.paths.size(); ++i) {
    json e;
    json via = json::array();
    for (const auto& c : trace.paths[i].via) via.push_back(detail::config_json(c));
    e["via"] = via;
    const auto& o = trace.outcomes[i];
    e["status"] = to_string(o.status);
    e["resume_index"] = o.resume_index;
    if (o.failure) {
      json f;
      f["position"] = detail::vec_json(o.failure->position, dim);
      f["direction"] = detail::vec_json(o.failure->direction, dim);
      if (o.failure->orientation) f["orientation"] = detail::quat_json(*o.failure->orientation);
      e["failure"] = f;
    }
    eps.push_back(e);
  }
  j["episodes"] = eps;
  return j;
}

/// Paths of a trace in episode order.
inline std::vector<Path> trace_paths(const json& j) {
  std::vector<Path> out;
  for (const auto& e : j.at("episodes")) {
    Path p;
    for (const auto& c : e.at("via")) p.via.push_back(detail::json_config(c));
    out.push_back(std::move(p));
  }
  return out;
}

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return json::parse(in);
}

inline void write_json_file(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << j.dump(1) << '\n';
}

inline Environment read_scenario(const std::string& path) { return environment_from_json(read_json_file(path)); }

inline void write_scenario(const std::string& path, const Environment& env) {
  write_json_file(path, environment_to_json(env));
}

}  // namespace probdis
