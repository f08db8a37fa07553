#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "hvf/maze.hpp"

namespace hvf {

// Nearest-pixel rasterizer, no anti-aliasing. Channel values live in [0,1].
struct RasterConfig {
  int resolution = 32;  // square frames
  int blob_px = 4;      // agent square side
  int goal_px = 4;  // goal marker side
  // Off by default: goal images are given by agent placement alone, so frames
  // differing only in agent position keep the clean disjoint-blob plateau and
  // the overlap reading of stop thresholds. Turn on for human-facing dumps.
  bool goal_marker = false;
  std::array<float, 3> bg{0.1f, 0.1f, 0.1f};
  std::array<float, 3> wall{1.0f, 1.0f, 1.0f};
  std::array<float, 3> goal{1.0f, 0.1f, 0.1f};
  std::array<float, 3> agent{0.1f, 1.0f, 0.1f};
};

// RGB row-major, row 0 at the top of the image (y = 1 edge of the arena).
struct Frame {
  int width = 0;
  int height = 0;
  std::vector<float> px;

  float* at(int row, int col) { return px.data() + 3 * (row * width + col); }
  const float* at(int row, int col) const {
    return px.data() + 3 * (row * width + col);
  }
};

namespace detail {

// Pixel whose cell contains the world coordinate, clamped to the image.
inline int cell_px(double v, int n) {
  int c = int(std::floor(v * n));
  return std::clamp(c, 0, n - 1);
}

inline void paint_square(Frame& f, int crow, int ccol, int side,
                         const std::array<float, 3>& color) {
  const int lo_r = crow - (side - 1) / 2, lo_c = ccol - (side - 1) / 2;
  for (int r = std::max(0, lo_r); r < std::min(f.height, lo_r + side); ++r)
    for (int c = std::max(0, lo_c); c < std::min(f.width, lo_c + side); ++c) {
      float* p = f.at(r, c);
      p[0] = color[0];
      p[1] = color[1];
      p[2] = color[2];
    }
}

}  // namespace detail

// Paint order: background, walls, goal marker, agent blob. The agent always
// wins overlaps so the planner can see it everywhere.
inline void render_into(const MazeState& s, const RasterConfig& cfg, Frame& f) {
  const int n = cfg.resolution;
  f.width = n;
  f.height = n;
  f.px.assign(std::size_t(3) * n * n, 0.0f);
  for (std::size_t i = 0; i < f.px.size(); i += 3) {
    f.px[i] = cfg.bg[0];
    f.px[i + 1] = cfg.bg[1];
    f.px[i + 2] = cfg.bg[2];
  }

  // Walls: columns whose center x falls inside the slab, rows whose center y
  // falls outside the open gap.
  const double h = s.layout.wall_thickness / 2.0;
  for (std::size_t w = 0; w < s.layout.wall_x.size(); ++w) {
    const double xlo = s.layout.wall_x[w] - h, xhi = s.layout.wall_x[w] + h;
    const double glo = s.layout.gap_center_y[w] - s.layout.gap_half_width;
    const double ghi = s.layout.gap_center_y[w] + s.layout.gap_half_width;
    for (int c = 0; c < n; ++c) {
      const double cx = (c + 0.5) / n;
      if (cx < xlo || cx > xhi) continue;
      for (int r = 0; r < n; ++r) {
        const double cy = 1.0 - (r + 0.5) / n;
        if (cy > glo && cy < ghi) continue;
        float* p = f.at(r, c);
        p[0] = cfg.wall[0];
        p[1] = cfg.wall[1];
        p[2] = cfg.wall[2];
      }
    }
  }

  if (cfg.goal_marker)
    detail::paint_square(f, n - 1 - detail::cell_px(s.goal.y, n),
                         detail::cell_px(s.goal.x, n), cfg.goal_px, cfg.goal);
  detail::paint_square(f, n - 1 - detail::cell_px(s.agent.y, n),
                       detail::cell_px(s.agent.x, n), cfg.blob_px, cfg.agent);
}

inline Frame render(const MazeState& s, const RasterConfig& cfg) {
  Frame f;
  render_into(s, cfg, f);
  return f;
}

// Sum of squared per-channel differences, accumulated in double.
inline double pixel_cost(const Frame& a, const Frame& b) {
  if (a.width != b.width || a.height != b.height || a.px.size() != b.px.size())
    throw std::invalid_argument("pixel_cost: frame shape mismatch");
  double acc = 0.0;
  for (std::size_t i = 0; i < a.px.size(); ++i) {
    const double d = double(a.px[i]) - double(b.px[i]);
    acc += d * d;
  }
  return acc;
}

// Cost between two frames that differ only by two disjoint unclipped agent
// blobs: each blob contributes blob_px^2 pixels of agent-vs-background error.
inline double plateau_cost(const RasterConfig& cfg) {
  double d2 = 0.0;
  for (int c = 0; c < 3; ++c) {
    const double d = double(cfg.agent[c]) - double(cfg.bg[c]);
    d2 += d * d;
  }
  return 2.0 * double(cfg.blob_px) * double(cfg.blob_px) * d2;
}

inline void write_ppm(const Frame& f, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << "P6\n" << f.width << " " << f.height << "\n255\n";
  for (float v : f.px) {
    const int b = int(std::lround(std::clamp(double(v), 0.0, 1.0) * 255.0));
    out.put(char(b));
  }
}

}  // namespace hvf
