#pragma once

#include <stdexcept>
#include <string>

#include "hvf/geometry.hpp"
#include "hvf/rng.hpp"

namespace hvf {

struct Action {
  Vec2 delta;
};

inline Action clip_action(Action a, double a_max) {
  a.delta.x = std::clamp(a.delta.x, -a_max, a_max);
  a.delta.y = std::clamp(a.delta.y, -a_max, a_max);
  return a;
}

// Point agent in the unit square. Layout and goal are frozen per episode.
struct MazeState {
  Vec2 agent;
  Vec2 goal;
  WallLayout layout;
};

enum class Difficulty { easy, medium, hard };

inline std::string to_string(Difficulty d) {
  switch (d) {
    case Difficulty::easy: return "easy";
    case Difficulty::medium: return "medium";
    default: return "hard";
  }
}

inline Difficulty parse_difficulty(const std::string& s) {
  if (s == "easy") return Difficulty::easy;
  if (s == "medium") return Difficulty::medium;
  if (s == "hard") return Difficulty::hard;
  throw std::invalid_argument("unknown difficulty: " + s);
}

inline bool is_success(const MazeState& s, double radius) {
  return distance(s.agent, s.goal) <= radius;
}

// True when the straight agent->goal segment crosses solid wall. Used to
// reject degenerate hard scenes where both gaps happen to line up.
inline bool straight_path_blocked(const MazeState& s) {
  double t;
  for (const Rect& r : wall_rects(s.layout))
    if (segment_rect_entry(s.agent, s.goal, r, t)) return true;
  return false;
}

namespace detail {

inline Vec2 sample_free_in_section(const WallLayout& w, int section, Rng& rng,
                                   int& budget) {
  while (budget-- > 0) {
    Vec2 p{rng.uniform01(), rng.uniform01()};
    if (!is_free_space(w, p)) continue;
    if (section >= 0 && section_of(w, p.x) != section) continue;
    return p;
  }
  throw std::runtime_error("scene sampling exceeded rejection budget");
}

}  // namespace detail

// Scene generator. Goal always lands in the rightmost section; the agent's
// section encodes difficulty (none / one / two walls between agent and goal).
// Hard additionally rejects scenes whose straight path threads both gaps.
inline MazeState sample_scene(Difficulty d, const GeometryConfig& g, Rng& rng) {
  MazeState s;
  s.layout.gap_half_width = g.gap_half_width;
  s.layout.wall_thickness = g.wall_thickness;
  s.layout.wall_x = {rng.uniform(g.wall_x0_min, g.wall_x0_max),
                     rng.uniform(g.wall_x1_min, g.wall_x1_max)};
  s.layout.gap_center_y = {rng.uniform(g.gap_half_width, 1.0 - g.gap_half_width),
                           rng.uniform(g.gap_half_width, 1.0 - g.gap_half_width)};
  validate_layout(s.layout);

  const int goal_section = int(s.layout.wall_x.size());
  int agent_section = goal_section;
  if (d == Difficulty::medium) agent_section = 1;
  if (d == Difficulty::hard) agent_section = 0;

  int budget = 10000;
  s.goal = detail::sample_free_in_section(s.layout, goal_section, rng, budget);
  for (;;) {
    s.agent = detail::sample_free_in_section(s.layout, agent_section, rng, budget);
    if (d != Difficulty::hard || straight_path_blocked(s)) return s;
    if (budget <= 0)
      throw std::runtime_error("scene sampling exceeded rejection budget");
  }
}

// Scene with the agent anywhere in free space; used for interaction data.
inline MazeState sample_scene_uniform(const GeometryConfig& g, Rng& rng) {
  MazeState s;
  s.layout.gap_half_width = g.gap_half_width;
  s.layout.wall_thickness = g.wall_thickness;
  s.layout.wall_x = {rng.uniform(g.wall_x0_min, g.wall_x0_max),
                     rng.uniform(g.wall_x1_min, g.wall_x1_max)};
  s.layout.gap_center_y = {rng.uniform(g.gap_half_width, 1.0 - g.gap_half_width),
                           rng.uniform(g.gap_half_width, 1.0 - g.gap_half_width)};
  validate_layout(s.layout);
  int budget = 10000;
  s.goal = detail::sample_free_in_section(s.layout, int(s.layout.wall_x.size()),
                                          rng, budget);
  s.agent = detail::sample_free_in_section(s.layout, -1, rng, budget);
  return s;
}

// One transition: clip the action, move along the straight segment, stop at
// the first wall or boundary contact (no sliding). Wall contacts back off by
// a hair so the agent never rests exactly on a face; the continuous
// truncation is what makes tunneling impossible for any action magnitude.
inline MazeState step(const MazeState& s, Action a, double a_max) {
  constexpr double contact_eps = 1e-9;
  const Action c = clip_action(a, a_max);
  const Vec2 p = s.agent;
  const Vec2 d = c.delta;
  const double len = norm(d);
  MazeState out = s;
  if (len == 0.0) return out;
  const Vec2 q = p + d;

  double t_wall = std::numeric_limits<double>::infinity();
  double t_entry;
  for (const Rect& r : wall_rects(s.layout))
    if (segment_rect_entry(p, q, r, t_entry)) t_wall = std::min(t_wall, t_entry);

  double t_bound = std::numeric_limits<double>::infinity();
  auto bound_axis = [&](double o, double dd) {
    if (dd > 0.0) t_bound = std::min(t_bound, (1.0 - o) / dd);
    else if (dd < 0.0) t_bound = std::min(t_bound, (0.0 - o) / dd);
  };
  bound_axis(p.x, d.x);
  bound_axis(p.y, d.y);

  double t = 1.0;
  if (t_wall <= std::min(1.0, t_bound)) {
    t = std::max(0.0, t_wall - contact_eps / len);
  } else if (t_bound < 1.0) {
    t = t_bound;
  }
  out.agent = p + t * d;
  out.agent.x = std::clamp(out.agent.x, 0.0, 1.0);
  out.agent.y = std::clamp(out.agent.y, 0.0, 1.0);
  return out;
}

}  // namespace hvf
