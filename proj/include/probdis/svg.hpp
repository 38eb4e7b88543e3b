#pragma once

#include "probdis/environments.hpp"
#include "probdis/harness.hpp"
#include "probdis/failure_map.hpp"
#include "probdis/planner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace probdis {

struct SvgOptions {
  int grid = 200;       // raster cells per side
  int pixels = 600;     // output width and height
  double path_step = 0.02;  // joint-space spacing when tracing a path
};

namespace detail {

inline std::string fmt_num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

}  // namespace detail

/// Top-down picture of a planar scene: the failure field as grayscale (dark
/// is likely to fail), true obstacles as outlines, failures as red dots with
/// their blocked direction, and the planned path as a blue end-effector trace.
inline std::string render_map_svg(const FailureMap& map, const Environment& env,
                                  const Path* path = nullptr, const SvgOptions& opt = {}) {
  if (env.mode != EnvMode::planar2d) throw std::invalid_argument("unsupported mode: map rendering is 2-D only");
  const double half = 1.05 * env.chain.reach();
  const double scale = opt.pixels / (2.0 * half);
  auto sx = [&](double x) { return (x + half) * scale; };
  auto sy = [&](double y) { return (half - y) * scale; };
  const double cell = 2.0 * half / opt.grid;
  const double cell_px = opt.pixels / static_cast<double>(opt.grid);

  std::ostringstream os;
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
     << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << opt.pixels << "\" height=\"" << opt.pixels
     << "\" viewBox=\"0 0 " << opt.pixels << ' ' << opt.pixels << "\">\n"
     << "<rect x=\"0\" y=\"0\" width=\"" << opt.pixels << "\" height=\"" << opt.pixels << "\" fill=\"#ffffff\"/>\n"
     << "<g id=\"failure-field\" shape-rendering=\"crispEdges\">\n";

  // Row-wise run-length encoding of equal gray levels keeps the file small.
  for (int row = 0; row < opt.grid; ++row) {
    const double y = half - (row + 0.5) * cell;
    int run_start = 0;
    int run_level = -1;
    auto flush = [&](int end_col) {
      if (run_level < 0 || run_level == 255) return;
      os << "<rect x=\"" << detail::fmt_num(run_start * cell_px) << "\" y=\"" << detail::fmt_num(row * cell_px)
         << "\" width=\"" << detail::fmt_num((end_col - run_start) * cell_px) << "\" height=\""
         << detail::fmt_num(cell_px) << "\" fill=\"rgb(" << run_level << ',' << run_level << ',' << run_level
         << ")\"/>\n";
    };
    for (int col = 0; col < opt.grid; ++col) {
      TaskPose p;
      p.position = {-half + (col + 0.5) * cell, y, 0.0};
      p.dim = 2;
      const double pf = map.prob_fail(p);
      const int level = static_cast<int>(std::lround(255.0 * (1.0 - std::clamp(pf, 0.0, 1.0))));
      if (level != run_level) {
        flush(col);
        run_start = col;
        run_level = level;
      }
    }
    flush(opt.grid);
  }
  os << "</g>\n";

  os << "<circle cx=\"" << detail::fmt_num(sx(0)) << "\" cy=\"" << detail::fmt_num(sy(0)) << "\" r=\""
     << detail::fmt_num(env.chain.reach() * scale)
     << "\" fill=\"none\" stroke=\"#999999\" stroke-dasharray=\"4 4\"/>\n";

  os << "<g id=\"obstacles\" fill=\"none\" stroke=\"#000000\" stroke-width=\"1.5\">\n";
  for (const auto& o : env.obstacles) {
    os << "<circle cx=\"" << detail::fmt_num(sx(o.center.x())) << "\" cy=\"" << detail::fmt_num(sy(o.center.y()))
       << "\" r=\"" << detail::fmt_num(o.radius * scale) << "\"/>\n";
  }
  os << "</g>\n";

  if (path && path->size() >= 2) {
    os << "<polyline id=\"path\" fill=\"none\" stroke=\"#1f4fd6\" stroke-width=\"2\" points=\"";
    for (std::size_t i = 0; i + 1 < path->size(); ++i) {
      const JointConfig& a = path->via[i];
      const JointConfig& b = path->via[i + 1];
      const int n = std::max(1, static_cast<int>(std::ceil((b - a).norm() / opt.path_step)));
      for (int k = (i == 0 ? 0 : 1); k <= n; ++k) {
        const Eigen::Vector3d p = fk_position(env.chain, a + (static_cast<double>(k) / n) * (b - a));
        os << detail::fmt_num(sx(p.x())) << ',' << detail::fmt_num(sy(p.y())) << ' ';
      }
    }
    os << "\"/>\n";
  }

  os << "<g id=\"failures\" fill=\"#d62020\" stroke=\"#d62020\">\n";
  for (const auto& f : map.records()) {
    const double x = sx(f.position.x());
    const double y = sy(f.position.y());
    os << "<circle cx=\"" << detail::fmt_num(x) << "\" cy=\"" << detail::fmt_num(y) << "\" r=\"3\"/>\n"
       << "<line x1=\"" << detail::fmt_num(x) << "\" y1=\"" << detail::fmt_num(y) << "\" x2=\""
       << detail::fmt_num(x + 12.0 * f.direction.x()) << "\" y2=\"" << detail::fmt_num(y - 12.0 * f.direction.y())
       << "\" stroke-width=\"1.5\"/>\n";
  }
  os << "</g>\n";

  const Eigen::Vector3d s = fk_position(env.chain, env.start);
  const Eigen::Vector3d g = fk_position(env.chain, env.goal);
  os << "<rect id=\"start\" x=\"" << detail::fmt_num(sx(s.x()) - 4) << "\" y=\"" << detail::fmt_num(sy(s.y()) - 4)
     << "\" width=\"8\" height=\"8\" fill=\"#20a040\"/>\n"
     << "<rect id=\"goal\" x=\"" << detail::fmt_num(sx(g.x()) - 4) << "\" y=\"" << detail::fmt_num(sy(g.y()) - 4)
     << "\" width=\"8\" height=\"8\" fill=\"#e0a000\"/>\n"
     << "</svg>\n";
  return os.str();
}

/// Success rate against the path budget b for pooled (or single-count) rows of
/// one mode: one line per method with its confidence band shaded.
inline std::string render_success_svg(const std::vector<ResultRow>& rows, EnvMode mode,
                                      std::optional<int> count = std::nullopt) {
  constexpr double width = 640.0;
  constexpr double height = 420.0;
  constexpr double left = 56.0;
  constexpr double right = 150.0;
  constexpr double top = 24.0;
  constexpr double bottom = 44.0;
  static const char* palette[] = {"#1f4fd6", "#d62020", "#e08a00", "#20a040", "#8a2be2", "#008b8b", "#555555"};

  std::vector<std::string> methods;
  int max_b = 1;
  for (const auto& r : rows) {
    if (r.mode != mode || r.count != count) continue;
    if (std::find(methods.begin(), methods.end(), r.method) == methods.end()) methods.push_back(r.method);
    max_b = std::max(max_b, r.b);
  }
  if (methods.empty()) throw std::invalid_argument("no rows for the requested mode and count");

  const double pw = width - left - right;
  const double ph = height - top - bottom;
  auto px = [&](int b) { return left + (max_b == 1 ? 0.5 : (b - 1.0) / (max_b - 1.0)) * pw; };
  auto py = [&](double rate) { return top + (1.0 - rate) * ph; };

  std::ostringstream os;
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
     << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
     << "\" viewBox=\"0 0 " << width << ' ' << height << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
     << "<rect x=\"0\" y=\"0\" width=\"" << width << "\" height=\"" << height << "\" fill=\"#ffffff\"/>\n";
  for (int i = 0; i <= 5; ++i) {
    const double rate = i / 5.0;
    os << "<line x1=\"" << detail::fmt_num(left) << "\" y1=\"" << detail::fmt_num(py(rate)) << "\" x2=\""
       << detail::fmt_num(left + pw) << "\" y2=\"" << detail::fmt_num(py(rate))
       << "\" stroke=\"#dddddd\"/>\n<text x=\"" << detail::fmt_num(left - 8) << "\" y=\""
       << detail::fmt_num(py(rate) + 4) << "\" text-anchor=\"end\">" << detail::fmt_num(rate) << "</text>\n";
  }
  for (int b = 1; b <= max_b; ++b) {
    if (max_b > 10 && b % 5 != 0 && b != 1) continue;
    os << "<text x=\"" << detail::fmt_num(px(b)) << "\" y=\"" << detail::fmt_num(top + ph + 16)
       << "\" text-anchor=\"middle\">" << b << "</text>\n";
  }
  os << "<text x=\"" << detail::fmt_num(left + pw / 2) << "\" y=\"" << detail::fmt_num(height - 8)
     << "\" text-anchor=\"middle\">paths executed (b)</text>\n"
     << "<text x=\"14\" y=\"" << detail::fmt_num(top + ph / 2) << "\" text-anchor=\"middle\" transform=\"rotate(-90 14 "
     << detail::fmt_num(top + ph / 2) << ")\">success rate</text>\n"
     << "<rect x=\"" << detail::fmt_num(left) << "\" y=\"" << detail::fmt_num(top) << "\" width=\""
     << detail::fmt_num(pw) << "\" height=\"" << detail::fmt_num(ph) << "\" fill=\"none\" stroke=\"#000000\"/>\n";

  for (std::size_t mi = 0; mi < methods.size(); ++mi) {
    std::vector<const ResultRow*> line;
    for (const auto& r : rows) {
      if (r.mode == mode && r.count == count && r.method == methods[mi]) line.push_back(&r);
    }
    std::sort(line.begin(), line.end(), [](const ResultRow* a, const ResultRow* b) { return a->b < b->b; });
    const char* color = palette[mi % (sizeof palette / sizeof *palette)];
    os << "<g id=\"method-" << methods[mi] << "\">\n<polygon fill=\"" << color << "\" fill-opacity=\"0.15\" points=\"";
    for (const auto* r : line) os << detail::fmt_num(px(r->b)) << ',' << detail::fmt_num(py(r->ci_hi)) << ' ';
    for (auto it = line.rbegin(); it != line.rend(); ++it) {
      os << detail::fmt_num(px((*it)->b)) << ',' << detail::fmt_num(py((*it)->ci_lo)) << ' ';
    }
    os << "\"/>\n<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
    for (const auto* r : line) os << detail::fmt_num(px(r->b)) << ',' << detail::fmt_num(py(r->rate)) << ' ';
    os << "\"/>\n";
    const double ly = top + 14.0 + 18.0 * static_cast<double>(mi);
    os << "<line x1=\"" << detail::fmt_num(left + pw + 12) << "\" y1=\"" << detail::fmt_num(ly - 4) << "\" x2=\""
       << detail::fmt_num(left + pw + 32) << "\" y2=\"" << detail::fmt_num(ly - 4) << "\" stroke=\"" << color
       << "\" stroke-width=\"2\"/>\n<text x=\"" << detail::fmt_num(left + pw + 38) << "\" y=\"" << detail::fmt_num(ly)
       << "\">" << methods[mi] << "</text>\n</g>\n";
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace probdis
