#pragma once

#include <span>
#include <stdexcept>
#include <vector>

#include "hvf/cem.hpp"
#include "hvf/generative.hpp"
#include "hvf/mpc.hpp"

namespace hvf {

enum class AggregateMode { max, mean };

inline std::string to_string(AggregateMode m) {
  return m == AggregateMode::max ? "max" : "mean";
}

inline AggregateMode parse_aggregate_mode(const std::string& s) {
  if (s == "max") return AggregateMode::max;
  if (s == "mean") return AggregateMode::mean;
  throw std::invalid_argument("unknown aggregate mode: " + s);
}

struct HvfConfig {
  int num_subgoals = 2;  // K
  AggregateMode mode = AggregateMode::max;
  CemConfig outer{200, 40, 5, 1e-3, 1e-6};
  MpcConfig search;  // cheap profile used inside the subgoal objective
  MpcConfig exec;    // full profile used when acting
  int per_subgoal_budget = 10;
  int total_budget = 50;
  double stop_threshold = 6.48;  // pixel-cost radius for "segment done"
  double success_radius = 0.05;
  // Optional first-batch candidates for the outer search.
  bool seed_start_latents = false;  // all subgoals at the current position
  bool seed_gap_latents = false;    // subgoals at the gaps between agent and goal
};

struct SubgoalPlan {
  std::vector<double> latents;     // winning K*L vector, empty when K = 0
  std::vector<Vec2> positions;     // decoded subgoal positions
  std::vector<Frame> frames;       // decoded subgoal frames
  double optimized_cost = 0.0;
  uint64_t eval_seed = 0;          // objective seed that produced optimized_cost
  std::vector<double> injected_costs;  // scores of force-included candidates
};

struct EpisodeResult {
  bool success = false;
  int steps = 0;
  std::vector<int> leg_steps;  // one entry per act() call: K subgoal legs, then goal
  std::vector<MazeState> trajectory;
  SubgoalPlan plan;
};

// Planning cost of each leg of the subgoal chain: start -> z_1 -> ... -> z_K
// -> goal gives K+1 segments. Each leg is scored by a fresh (cheap) action
// search from the leg's start state toward the leg's target frame. With K = 0
// this is exactly one direct plan toward the goal.
inline std::vector<double> segment_costs(const DynamicsModel& model,
                                         const GenerativeModel& gen,
                                         const MazeState& start, const Frame& goal,
                                         std::span<const double> z,
                                         const MpcConfig& search, Rng& rng) {
  const int l = gen.latent_dim();
  if (z.size() % std::size_t(l) != 0)
    throw std::invalid_argument("segment_costs: latent size not a multiple of dim");
  const int k = int(z.size()) / l;

  std::vector<double> costs;
  costs.reserve(k + 1);
  MazeState leg_start = start;
  thread_local Frame target;
  for (int i = 0; i < k; ++i) {
    const MazeState sub = gen.decode_state(z.subspan(std::size_t(i) * l, l), start);
    model.start_frame(sub, target);
    costs.push_back(plan(model, leg_start, target, search, rng).predicted_cost);
    leg_start = sub;
  }
  costs.push_back(plan(model, leg_start, goal, search, rng).predicted_cost);
  return costs;
}

inline double aggregate(std::span<const double> costs, AggregateMode mode) {
  if (costs.empty()) throw std::invalid_argument("aggregate: no costs");
  if (mode == AggregateMode::max) {
    double m = costs[0];
    for (double c : costs) m = std::max(m, c);
    return m;
  }
  double s = 0.0;
  for (double c : costs) s += c;
  return s / double(costs.size());
}

namespace detail {

inline void place_latent(std::vector<double>& v, int slot, int latent_dim, Vec2 p) {
  v[std::size_t(slot) * latent_dim] = FreeSpaceDecoder::logit(p.x);
  v[std::size_t(slot) * latent_dim + 1] = FreeSpaceDecoder::logit(p.y);
}

// Gaps of the walls that separate the agent's section from the goal's.
inline std::vector<Vec2> blocking_gaps(const MazeState& s) {
  const int sa = section_of(s.layout, s.agent.x);
  const int sg = section_of(s.layout, s.goal.x);
  std::vector<Vec2> out;
  if (sa < 0 || sg < 0) return out;
  const int lo = std::min(sa, sg), hi = std::max(sa, sg);
  for (int w = lo; w < hi; ++w)
    out.push_back({s.layout.wall_x[w], s.layout.gap_center_y[w]});
  if (sa > sg) std::reverse(out.begin(), out.end());
  return out;
}

inline std::vector<std::vector<double>> seed_candidates(const MazeState& start,
                                                        const HvfConfig& cfg,
                                                        int latent_dim) {
  std::vector<std::vector<double>> out;
  const int k = cfg.num_subgoals;
  if (cfg.seed_start_latents) {
    std::vector<double> v(std::size_t(k) * latent_dim, 0.0);
    for (int i = 0; i < k; ++i) place_latent(v, i, latent_dim, start.agent);
    out.push_back(std::move(v));
  }
  if (cfg.seed_gap_latents) {
    const auto gaps = blocking_gaps(start);
    if (int(gaps.size()) == k) {
      std::vector<double> v(std::size_t(k) * latent_dim, 0.0);
      for (int i = 0; i < k; ++i) place_latent(v, i, latent_dim, gaps[i]);
      out.push_back(std::move(v));
    } else if (gaps.empty() && k == 1) {
      // Nothing blocks the way; offer the midpoint as a waypoint.
      std::vector<double> v(std::size_t(latent_dim), 0.0);
      place_latent(v, 0, latent_dim, 0.5 * (start.agent + start.goal));
      out.push_back(std::move(v));
    }
  }
  return out;
}

}  // namespace detail

// Outer search over K stacked latents. Every sample decodes to K subgoal
// frames whose chain is scored by segment_costs; the aggregate (worst leg by
// default) is minimised. K = 0 degenerates to an empty plan and consumes no
// randomness, so downstream execution matches plain receding-horizon control
// bit for bit.
inline SubgoalPlan optimize_subgoals(const DynamicsModel& model,
                                     const GenerativeModel& gen,
                                     const MazeState& start, const Frame& goal,
                                     const HvfConfig& cfg, Rng& rng) {
  SubgoalPlan out;
  if (cfg.num_subgoals < 0)
    throw std::invalid_argument("optimize_subgoals: negative subgoal count");
  if (cfg.num_subgoals == 0) return out;

  const int l = gen.latent_dim();
  const int dim = cfg.num_subgoals * l;
  auto objective = [&](std::span<const double> z, Rng& eval_rng) {
    return aggregate(segment_costs(model, gen, start, goal, z, cfg.search, eval_rng),
                     cfg.mode);
  };
  const auto seeds = detail::seed_candidates(start, cfg, l);
  CemResult r = cem_optimize(objective, dim, cfg.outer, rng, seeds);

  out.latents = std::move(r.best_vector);
  out.optimized_cost = r.best_cost;
  out.eval_seed = r.best_eval_seed;
  out.injected_costs = std::move(r.injected_costs);
  for (int i = 0; i < cfg.num_subgoals; ++i) {
    const MazeState sub = gen.decode_state(
        std::span<const double>(out.latents).subspan(std::size_t(i) * l, l), start);
    out.positions.push_back(sub.agent);
    out.frames.push_back(render(sub, model.raster()));
  }
  return out;
}

// Full episode: search subgoals once, then chase each subgoal frame under a
// per-subgoal step allowance, finally chase the goal frame with whatever
// budget is left. Success is judged by the environment, not by pixels.
inline EpisodeResult run_hvf_episode(const DynamicsModel& model,
                                     const GenerativeModel& gen,
                                     const MazeState& scene, const HvfConfig& cfg,
                                     Rng& rng) {
  if (cfg.stop_threshold < 0.0)
    throw std::invalid_argument("run_hvf_episode: stop_threshold unset");
  EpisodeResult res;
  if (is_success(scene, cfg.success_radius)) {
    res.success = true;
    res.trajectory.push_back(scene);
    return res;
  }
  MazeState goal_state = scene;
  goal_state.agent = scene.goal;
  Frame goal;
  model.start_frame(goal_state, goal);

  res.plan = optimize_subgoals(model, gen, scene, goal, cfg, rng);
  res.trajectory.push_back(scene);

  MazeState cur = scene;
  auto append = [&](const ActResult& a) {
    res.trajectory.insert(res.trajectory.end(), a.trajectory.begin() + 1,
                          a.trajectory.end());
    res.steps += a.steps;
    res.leg_steps.push_back(a.steps);
    cur = res.trajectory.back();
  };

  for (const Frame& sub : res.plan.frames) {
    const int allowance = std::min(cfg.per_subgoal_budget, cfg.total_budget - res.steps);
    if (allowance <= 0) break;
    append(act(model, cur, sub, allowance, cfg.stop_threshold, cfg.exec, rng));
  }
  if (res.steps < cfg.total_budget) {
    append(act(model, cur, goal, cfg.total_budget - res.steps, cfg.stop_threshold,
               cfg.exec, rng,
               [&](const MazeState& s) { return is_success(s, cfg.success_radius); }));
  }
  res.success = is_success(cur, cfg.success_radius);
  return res;
}

}  // namespace hvf
