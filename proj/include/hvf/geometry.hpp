#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace hvf {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double norm(Vec2 a) { return std::sqrt(a.x * a.x + a.y * a.y); }
inline double distance(Vec2 a, Vec2 b) { return norm(a - b); }

// Arena is the unit square. Each wall is a vertical slab with one open gap;
// the slab splits into two solid axis-aligned rectangles.
struct GeometryConfig {
  double wall_x0_min = 0.28;
  double wall_x0_max = 0.38;
  double wall_x1_min = 0.60;
  double wall_x1_max = 0.72;
  double gap_half_width = 0.07;
  double wall_thickness = 0.04;
  double a_max = 0.05;
  double success_radius = 0.05;
};

struct WallLayout {
  std::vector<double> wall_x;        // slab centers, strictly increasing
  std::vector<double> gap_center_y;  // one gap per wall
  double gap_half_width = 0.07;
  double wall_thickness = 0.04;
};

struct Rect {
  double xlo = 0, xhi = 0, ylo = 0, yhi = 0;
  bool contains(Vec2 p) const {
    return p.x >= xlo && p.x <= xhi && p.y >= ylo && p.y <= yhi;
  }
};

inline void validate_layout(const WallLayout& w) {
  if (w.wall_x.size() != w.gap_center_y.size())
    throw std::invalid_argument("layout: wall/gap count mismatch");
  if (w.gap_half_width <= 0 || w.wall_thickness <= 0)
    throw std::invalid_argument("layout: nonpositive gap or thickness");
  const double h = w.wall_thickness / 2.0;
  for (std::size_t i = 0; i < w.wall_x.size(); ++i) {
    if (w.wall_x[i] - h <= 0.0 || w.wall_x[i] + h >= 1.0)
      throw std::invalid_argument("layout: wall slab leaves the arena");
    if (i > 0 && w.wall_x[i] - h <= w.wall_x[i - 1] + h)
      throw std::invalid_argument("layout: wall slabs overlap or out of order");
    const double g = w.gap_center_y[i];
    if (g - w.gap_half_width < 0.0 || g + w.gap_half_width > 1.0)
      throw std::invalid_argument("layout: gap leaves the arena");
  }
}

// Solid rectangles of a layout: two per wall (below and above the gap).
// A gap flush with an arena edge degenerates one rectangle away.
inline std::vector<Rect> wall_rects(const WallLayout& w) {
  std::vector<Rect> out;
  out.reserve(2 * w.wall_x.size());
  const double h = w.wall_thickness / 2.0;
  for (std::size_t i = 0; i < w.wall_x.size(); ++i) {
    const double xlo = w.wall_x[i] - h, xhi = w.wall_x[i] + h;
    const double glo = w.gap_center_y[i] - w.gap_half_width;
    const double ghi = w.gap_center_y[i] + w.gap_half_width;
    if (glo > 0.0) out.push_back({xlo, xhi, 0.0, glo});
    if (ghi < 1.0) out.push_back({xlo, xhi, ghi, 1.0});
  }
  return out;
}

inline bool in_wall(const WallLayout& w, Vec2 p) {
  const double h = w.wall_thickness / 2.0;
  for (std::size_t i = 0; i < w.wall_x.size(); ++i) {
    if (p.x < w.wall_x[i] - h || p.x > w.wall_x[i] + h) continue;
    const double g = w.gap_center_y[i];
    if (p.y > g - w.gap_half_width && p.y < g + w.gap_half_width) continue;
    return true;
  }
  return false;
}

inline bool in_arena(Vec2 p) {
  return p.x >= 0.0 && p.x <= 1.0 && p.y >= 0.0 && p.y <= 1.0;
}

inline bool is_free_space(const WallLayout& w, Vec2 p) {
  return in_arena(p) && !in_wall(w, p);
}

// Vertical sections split by the wall slabs: 0 = left of the first slab,
// wall_x.size() = right of the last. Returns -1 inside a slab's x-range.
inline int section_of(const WallLayout& w, double x) {
  const double h = w.wall_thickness / 2.0;
  for (std::size_t i = 0; i < w.wall_x.size(); ++i) {
    if (x < w.wall_x[i] - h) return int(i);
    if (x <= w.wall_x[i] + h) return -1;
  }
  return int(w.wall_x.size());
}

inline std::vector<Vec2> gap_positions(const WallLayout& w) {
  std::vector<Vec2> out;
  out.reserve(w.wall_x.size());
  for (std::size_t i = 0; i < w.wall_x.size(); ++i)
    out.push_back({w.wall_x[i], w.gap_center_y[i]});
  return out;
}

// First parameter t in [0,1] at which p + t*(q-p) enters r (slab method).
// False when the segment misses the rectangle entirely.
inline bool segment_rect_entry(Vec2 p, Vec2 q, const Rect& r, double& t_enter) {
  const double dx = q.x - p.x, dy = q.y - p.y;
  double t0 = 0.0, t1 = 1.0;
  auto clip_axis = [&](double d, double lo, double hi, double o) {
    if (d == 0.0) return o >= lo && o <= hi;
    double ta = (lo - o) / d, tb = (hi - o) / d;
    if (ta > tb) std::swap(ta, tb);
    t0 = std::max(t0, ta);
    t1 = std::min(t1, tb);
    return t0 <= t1;
  };
  if (!clip_axis(dx, r.xlo, r.xhi, p.x)) return false;
  if (!clip_axis(dy, r.ylo, r.yhi, p.y)) return false;
  t_enter = t0;
  return true;
}

// Nearest free point at distance >= margin from every wall face, used to pull
// decoded or predicted positions out of solid geometry. Points already clear
// of the inflated slabs are returned unchanged.
inline Vec2 project_to_free(const WallLayout& w, Vec2 p, double margin) {
  const double h = w.wall_thickness / 2.0 + margin;
  for (std::size_t i = 0; i < w.wall_x.size(); ++i) {
    const double xlo = w.wall_x[i] - h, xhi = w.wall_x[i] + h;
    if (p.x <= xlo || p.x >= xhi) continue;
    const double g = w.gap_center_y[i];
    const double band = w.gap_half_width - margin;
    if (band > 0.0 && p.y > g - band && p.y < g + band) continue;  // inside the open gap
    Vec2 best{};
    double best_d = std::numeric_limits<double>::infinity();
    auto consider = [&](Vec2 c) {
      const double d = distance(p, c);
      if (d < best_d) {
        best_d = d;
        best = c;
      }
    };
    consider({xlo, p.y});
    consider({xhi, p.y});
    if (band > 0.0) consider({p.x, std::clamp(p.y, g - band, g + band)});
    p = best;  // slabs never overlap, so one projection cannot enter another
  }
  p.x = std::clamp(p.x, 0.0, 1.0);
  p.y = std::clamp(p.y, 0.0, 1.0);
  return p;
}

}  // namespace hvf
