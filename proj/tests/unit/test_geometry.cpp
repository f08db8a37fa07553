#include <catch2/catch_amalgamated.hpp>

#include "hvf/geometry.hpp"
#include "hvf/rng.hpp"
#include "oracles.hpp"

using hvf::Rect;
using hvf::Vec2;
using hvf::WallLayout;

namespace {
WallLayout two_walls() {
  WallLayout w;
  w.wall_x = {0.33, 0.66};
  w.gap_center_y = {0.25, 0.75};
  w.gap_half_width = 0.07;
  w.wall_thickness = 0.04;
  return w;
}
}  // namespace

TEST_CASE("wall_rects splits each wall at its gap", "[geometry]") {
  const auto rects = hvf::wall_rects(two_walls());
  REQUIRE(rects.size() == 4);
  // wall 0: x in [0.31, 0.35], gap open on (0.18, 0.32)
  REQUIRE(rects[0].xlo == Catch::Approx(0.31));
  REQUIRE(rects[0].xhi == Catch::Approx(0.35));
  REQUIRE(rects[0].ylo == 0.0);
  REQUIRE(rects[0].yhi == Catch::Approx(0.18));
  REQUIRE(rects[1].ylo == Catch::Approx(0.32));
  REQUIRE(rects[1].yhi == 1.0);
}

TEST_CASE("gap flush with the arena edge drops one rectangle", "[geometry]") {
  WallLayout w = two_walls();
  w.gap_center_y[0] = w.gap_half_width;  // gap touches y = 0
  REQUIRE(hvf::wall_rects(w).size() == 3);
}

TEST_CASE("free-space check agrees with the direct definition", "[geometry]") {
  const WallLayout w = two_walls();
  hvf::Rng rng(11);
  for (int i = 0; i < 20000; ++i) {
    const Vec2 p{rng.uniform01(), rng.uniform01()};
    REQUIRE(hvf::in_wall(w, p) == oracle::point_in_solid(w, p));
  }
}

TEST_CASE("section_of classifies by slab planes", "[geometry]") {
  const WallLayout w = two_walls();
  REQUIRE(hvf::section_of(w, 0.1) == 0);
  REQUIRE(hvf::section_of(w, 0.5) == 1);
  REQUIRE(hvf::section_of(w, 0.9) == 2);
  REQUIRE(hvf::section_of(w, 0.33) == -1);   // inside the slab
  REQUIRE(hvf::section_of(w, 0.675) == -1);  // inside the second slab
}

TEST_CASE("segment entry matches closed-form cases", "[geometry]") {
  const Rect r{0.31, 0.35, 0.0, 0.18};
  double t;
  // Straight horizontal hit: p.x + t*dx = 0.31 at t = (0.31-0.2)/0.3
  REQUIRE(hvf::segment_rect_entry({0.2, 0.1}, {0.5, 0.1}, r, t));
  REQUIRE(t == Catch::Approx((0.31 - 0.2) / 0.3).epsilon(1e-12));
  // Miss above the rect
  REQUIRE_FALSE(hvf::segment_rect_entry({0.2, 0.5}, {0.5, 0.5}, r, t));
  // Vertical entry through the top face
  REQUIRE(hvf::segment_rect_entry({0.33, 0.5}, {0.33, 0.1}, r, t));
  REQUIRE(t == Catch::Approx((0.5 - 0.18) / 0.4).epsilon(1e-12));
  // Segment ending before the rect
  REQUIRE_FALSE(hvf::segment_rect_entry({0.2, 0.1}, {0.29, 0.1}, r, t));
}

TEST_CASE("segment entry agrees with a marching oracle", "[geometry]") {
  hvf::Rng rng(23);
  for (int i = 0; i < 300; ++i) {
    const Rect r{rng.uniform(0.2, 0.5), 0, rng.uniform(0.1, 0.5), 0};
    Rect rect{r.xlo, r.xlo + rng.uniform(0.02, 0.2), r.ylo, r.ylo + rng.uniform(0.02, 0.2)};
    const Vec2 p{rng.uniform01(), rng.uniform01()};
    if (rect.contains(p)) continue;  // entry semantics need an outside start
    const Vec2 q{rng.uniform01(), rng.uniform01()};
    double t;
    const bool hit = hvf::segment_rect_entry(p, q, rect, t);
    const auto march = oracle::segment_entry_marching(p, q, rect);
    if (hit) {
      REQUIRE(march.has_value());
      REQUIRE(std::abs(*march - t) < 1e-4);
    } else {
      // The marcher can clip a corner the exact test calls tangent; accept
      // only genuinely interior hits as disagreement.
      if (march.has_value()) {
        const double tm = *march;
        const Vec2 hitp{p.x + tm * (q.x - p.x), p.y + tm * (q.y - p.y)};
        const bool interior = hitp.x > rect.xlo + 1e-9 && hitp.x < rect.xhi - 1e-9 &&
                              hitp.y > rect.ylo + 1e-9 && hitp.y < rect.yhi - 1e-9;
        REQUIRE_FALSE(interior);
      }
    }
  }
}

TEST_CASE("projection clears the inflated slab", "[geometry]") {
  const WallLayout w = two_walls();
  const double margin = 0.0625;
  hvf::Rng rng(31);
  for (int i = 0; i < 5000; ++i) {
    const Vec2 p{rng.uniform01(), rng.uniform01()};
    const Vec2 q = hvf::project_to_free(w, p, margin);
    // Result must keep clearance from every wall face unless it sits in a
    // gap's open band.
    for (std::size_t k = 0; k < w.wall_x.size(); ++k) {
      const double xlo = w.wall_x[k] - w.wall_thickness / 2 - margin;
      const double xhi = w.wall_x[k] + w.wall_thickness / 2 + margin;
      if (q.x <= xlo + 1e-12 || q.x >= xhi - 1e-12) continue;
      const double dy = std::abs(q.y - w.gap_center_y[k]);
      REQUIRE(dy <= w.gap_half_width - margin + 1e-12);
    }
    REQUIRE(hvf::in_arena(q));
    if (!hvf::in_wall(w, p)) {
      const bool clear_everywhere = [&] {
        for (std::size_t k = 0; k < w.wall_x.size(); ++k) {
          const double xlo = w.wall_x[k] - w.wall_thickness / 2 - margin;
          const double xhi = w.wall_x[k] + w.wall_thickness / 2 + margin;
          if (p.x > xlo && p.x < xhi) {
            const double dy = std::abs(p.y - w.gap_center_y[k]);
            if (dy > w.gap_half_width - margin) return false;
          }
        }
        return true;
      }();
      if (clear_everywhere) {
        REQUIRE(q.x == p.x);
        REQUIRE(q.y == p.y);
      }
    }
  }
}

TEST_CASE("layout validation rejects malformed geometry", "[geometry]") {
  WallLayout w = two_walls();
  w.wall_x = {0.66, 0.33};
  w.gap_center_y = {0.5, 0.5};
  REQUIRE_THROWS_AS(hvf::validate_layout(w), std::invalid_argument);
  w = two_walls();
  w.gap_center_y[0] = 0.01;  // gap pokes out of the arena
  REQUIRE_THROWS_AS(hvf::validate_layout(w), std::invalid_argument);
  REQUIRE_NOTHROW(hvf::validate_layout(two_walls()));
}
