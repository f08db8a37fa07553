#pragma once

#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

#include "hvf/cem.hpp"
#include "hvf/dynamics.hpp"
#include "hvf/maze.hpp"
#include "hvf/raster.hpp"

namespace hvf {

struct MpcConfig {
  int horizon = 5;
  // keep_first_tie: on the flat plateau far from a goal every sample ties, and
  // the straight-at-the-goal candidate must anchor that tie or act() degrades
  // to a random walk there.
  CemConfig cem{200, 40, 5, 1e-3, 1e-6, true};
  double a_max = 0.05;
  // Score a straight run at the goal blob alongside the random candidates.
  bool aim_candidate = true;
};

struct PlanResult {
  std::vector<Action> actions;
  double predicted_cost = 0.0;
};

namespace detail {

inline std::vector<Action> decode_actions(std::span<const double> x, double a_max) {
  std::vector<Action> a(x.size() / 2);
  for (std::size_t t = 0; t < a.size(); ++t)
    a[t] = clip_action({{x[2 * t] * a_max, x[2 * t + 1] * a_max}}, a_max);
  return a;
}

// World point that re-renders the agent blob exactly where the frame shows
// it: the center of the cell that generated the paint window. The pixel
// centroid of an even-sided blob lies on a cell boundary, so aiming there
// lands one cell off in each axis. Inferred from the window's top-left pixel;
// exact for unclipped blobs, near for clipped ones. False when no agent
// pixels exist (cannot happen, but stay total anyway).
inline bool blob_target(const Frame& f, const RasterConfig& raster, Vec2& out) {
  const int n = raster.resolution;
  int r_min = n, c_min = n;
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) {
      const float* p = f.at(r, c);
      if (p[0] == raster.agent[0] && p[1] == raster.agent[1] && p[2] == raster.agent[2]) {
        r_min = std::min(r_min, r);
        c_min = std::min(c_min, c);
      }
    }
  if (r_min == n) return false;
  const int half = (raster.blob_px - 1) / 2;
  out = {(c_min + half + 0.5) / n, (n - 0.5 - r_min - half) / n};
  return true;
}

// Action sequence whose integrated path is the straight segment from->target,
// run at full speed under the per-axis clip. Kinematic only: walls are the
// objective's problem, not the candidate's. Clamping each axis independently
// instead would trace an L-shaped detour that rams walls the segment clears.
inline std::vector<double> straight_run(Vec2 from, Vec2 target, int horizon,
                                        double a_max) {
  std::vector<double> x(2 * std::size_t(horizon), 0.0);
  Vec2 rem{target.x - from.x, target.y - from.y};
  for (int t = 0; t < horizon; ++t) {
    const double span = std::max(std::abs(rem.x), std::abs(rem.y));
    if (span <= 0.0) break;
    const double scale = std::min(1.0, a_max / span);
    const Vec2 move{rem.x * scale, rem.y * scale};
    x[2 * std::size_t(t)] = move.x / a_max;
    x[2 * std::size_t(t) + 1] = move.y / a_max;
    rem.x -= move.x;
    rem.y -= move.y;
  }
  return x;
}

}  // namespace detail

// Open-loop action search: CEM over 2*horizon action coordinates (unit scale,
// then scaled by a_max and clipped), scored by squared pixel distance between
// the final predicted frame and the goal frame. Two candidates are always
// scored alongside the random batch: the all-zero "stay put" sequence, so the
// plan can never look worse than idling, and (when enabled) a straight run at
// the goal blob read off the goal frame. The latter matters because the cost
// field is flat between distant blobs while frames whose blob leaves the
// image shed mismatch pixels — without a directed candidate the search drifts
// into that border trap whenever the goal is out of one-shot reach.
inline PlanResult plan(const DynamicsModel& model, const MazeState& start,
                       const Frame& goal, const MpcConfig& cfg, Rng& rng) {
  if (cfg.horizon < 1) throw std::invalid_argument("plan: horizon must be positive");
  if (goal.width != model.raster().resolution || goal.height != model.raster().resolution)
    throw std::invalid_argument("plan: goal frame shape mismatch");

  const int dim = 2 * cfg.horizon;
  auto objective = [&](std::span<const double> x) {
    thread_local std::vector<Action> acts;
    thread_local Frame pred;
    acts.resize(std::size_t(cfg.horizon));
    for (int t = 0; t < cfg.horizon; ++t)
      acts[t] = clip_action({{x[2 * t] * cfg.a_max, x[2 * t + 1] * cfg.a_max}}, cfg.a_max);
    model.final_frame(start, acts, pred);
    return pixel_cost(pred, goal);
  };

  // The aim run goes first: scored ahead of everything else, it wins cost
  // ties under keep_first_tie, so a flat landscape marches instead of drifts.
  std::vector<std::vector<double>> candidates;
  Vec2 target;
  if (cfg.aim_candidate && detail::blob_target(goal, model.raster(), target))
    candidates.push_back(detail::straight_run(start.agent, target, cfg.horizon, cfg.a_max));
  candidates.emplace_back(dim, 0.0);
  CemResult r = cem_optimize(objective, dim, cfg.cem, rng, candidates);
  return {detail::decode_actions(r.best_vector, cfg.a_max), r.best_cost};
}

struct ActResult {
  std::vector<MazeState> trajectory;  // starts with the initial state
  int steps = 0;
  bool reached = false;
};

// Receding-horizon execution: replan from scratch each step, apply only the
// first action in the real environment. Stops when the live frame is within
// stop_threshold of the goal frame (or reached_pred fires), or the step
// budget runs out.
inline ActResult act(const DynamicsModel& model, const MazeState& start,
                     const Frame& goal, int max_steps, double stop_threshold,
                     const MpcConfig& cfg, Rng& rng,
                     const std::function<bool(const MazeState&)>& reached_pred = {}) {
  if (max_steps < 0) throw std::invalid_argument("act: negative step budget");
  ActResult res;
  res.trajectory.push_back(start);
  Frame live;
  MazeState cur = start;
  for (;;) {
    if (reached_pred) {
      res.reached = reached_pred(cur);
    } else {
      model.start_frame(cur, live);
      res.reached = pixel_cost(live, goal) < stop_threshold;
    }
    if (res.reached || res.steps >= max_steps) break;
    PlanResult p = plan(model, cur, goal, cfg, rng);
    cur = step(cur, p.actions.at(0), cfg.a_max);
    res.trajectory.push_back(cur);
    ++res.steps;
  }
  return res;
}

}  // namespace hvf
