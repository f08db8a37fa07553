#pragma once

#include <chrono>
#include <filesystem>
#include <iostream>
#include <memory>
#include <mutex>

#include <json.hpp>

#include "hvf/config.hpp"
#include "hvf/dynamics.hpp"
#include "hvf/hvf.hpp"
#include "hvf/parallel.hpp"
#include "hvf/report.hpp"

namespace hvf {

// Seconds charged per predicted model state in the deterministic wall-clock
// column. Real timings vary run to run; reruns of a benchmark must not.
inline constexpr double kSecondsPerPredictedState = 2e-6;

enum class Method { no_subgoal, hvf_planner, gt_bottleneck };

inline std::string to_string(Method m) {
  switch (m) {
    case Method::no_subgoal: return "no_subgoal";
    case Method::hvf_planner: return "hvf";
    default: return "gt_bottleneck";
  }
}

inline Method parse_method(const std::string& s) {
  if (s == "no_subgoal") return Method::no_subgoal;
  if (s == "hvf") return Method::hvf_planner;
  if (s == "gt_bottleneck") return Method::gt_bottleneck;
  throw std::invalid_argument("unknown method: " + s);
}

// Random-interaction corpus: scenes with the agent anywhere in free space,
// actions uniform in the action box. Per-episode child seeds keep collection
// order-independent, so the corpus is reproducible under any worker count.
inline InteractionDataset collect(const ExperimentConfig& cfg, uint64_t seed) {
  InteractionDataset d;
  d.seed = seed;
  d.horizon = cfg.collect_horizon;
  d.episodes.resize(cfg.collect_episodes);
  parallel_for(d.episodes.size(), [&](std::size_t e) {
    Rng rng(mix_seed(seed, e));
    const MazeState scene = sample_scene_uniform(cfg.geometry, rng);
    Episode& ep = d.episodes[e];
    ep.layout = scene.layout;
    ep.goal = scene.goal;
    ep.positions.push_back(scene.agent);
    MazeState s = scene;
    for (int t = 0; t < cfg.collect_horizon; ++t) {
      const Action a{{rng.uniform(-cfg.geometry.a_max, cfg.geometry.a_max),
                      rng.uniform(-cfg.geometry.a_max, cfg.geometry.a_max)}};
      s = step(s, a, cfg.geometry.a_max);
      ep.actions.push_back(a);
      ep.positions.push_back(s.agent);
    }
  });
  return d;
}

inline nlohmann::json dataset_manifest(const InteractionDataset& d,
                                       const ExperimentConfig& cfg) {
  nlohmann::json j;
  j["seed"] = d.seed;
  j["episodes"] = d.episodes.size();
  j["horizon"] = d.horizon;
  j["transitions"] = d.transition_count();
  j["content_hash"] = dataset_content_hash(d);
  j["config_hash"] = config_hash(cfg);
  return j;
}

// One benchmark cell: a (method, difficulty) pair run under a specific
// experiment config for cfg.trials paired scenes.
struct CellSpec {
  Method method = Method::hvf_planner;
  Difficulty difficulty = Difficulty::hard;
  ExperimentConfig cfg;
};

struct EpisodeRecord {
  uint64_t scene_seed = 0;
  bool success = false;
  bool failed = false;  // the episode aborted with an error
  int steps = 0;
  uint64_t frames_predicted = 0;
  std::string error;
  SubgoalPlan plan;
  MazeState scene;
  std::vector<MazeState> trajectory;
};

struct CellResult {
  ResultRow row;
  std::vector<EpisodeRecord> episodes;
};

namespace detail {

inline HvfConfig cell_hvf_config(const CellSpec& cell) {
  ExperimentConfig cfg = cell.cfg;
  if (cell.method == Method::no_subgoal) cfg.num_subgoals = 0;
  if (cell.method == Method::gt_bottleneck) {
    // One subgoal per wall standing between agent and goal; the easy tier has
    // none, so a single midpoint waypoint stands in.
    switch (cell.difficulty) {
      case Difficulty::hard: cfg.num_subgoals = 2; break;
      default: cfg.num_subgoals = 1; break;
    }
    cfg.seed_gap_latents = true;
  }
  return make_hvf(cfg);
}

}  // namespace detail

// Runs one cell. Scene seeds depend only on (base_seed, trial), so every
// method sees the same scene sequence; planner seeds also mix the method so
// methods draw independent search noise.
inline CellResult run_cell(const CellSpec& cell, const DynamicsModel& model,
                           const GenerativeModel& gen) {
  const ExperimentConfig& cfg = cell.cfg;
  const HvfConfig hvf_cfg = detail::cell_hvf_config(cell);
  CellResult out;
  out.episodes.resize(cfg.trials);

  parallel_for(std::size_t(cfg.trials), [&](std::size_t t) {
    EpisodeRecord& rec = out.episodes[t];
    rec.scene_seed = mix_seed(cfg.base_seed + t, 0x5ce7e5ull);
    try {
      Rng scene_rng(rec.scene_seed);
      rec.scene = sample_scene(cell.difficulty, cfg.geometry, scene_rng);
      const uint64_t planner_seed =
          mix_seed(cfg.base_seed + t, fnv1a64(to_string(cell.method)));
      Rng planner_rng(planner_seed);
      CountingDynamics counted(model);
      const EpisodeResult ep = run_hvf_episode(counted, gen, rec.scene, hvf_cfg, planner_rng);
      rec.success = ep.success;
      rec.steps = ep.steps;
      rec.plan = ep.plan;
      rec.trajectory = ep.trajectory;
      rec.frames_predicted = counted.frames_predicted();
    } catch (const std::exception& e) {
      rec.failed = true;
      rec.error = e.what();
    }
  });

  ResultRow& r = out.row;
  r.method = to_string(cell.method);
  r.difficulty = to_string(cell.difficulty);
  r.k = hvf_cfg.num_subgoals;
  r.mode = to_string(hvf_cfg.mode);
  r.samples = hvf_cfg.exec.cem.num_samples;
  r.horizon = hvf_cfg.exec.horizon;
  uint64_t frames = 0;
  int completed = 0;
  for (const EpisodeRecord& rec : out.episodes) {
    if (rec.failed) {
      r.complete = false;
      std::cerr << "episode failed (seed " << rec.scene_seed << "): " << rec.error << "\n";
      continue;
    }
    ++completed;
    r.successes += rec.success ? 1 : 0;
    r.mean_steps += rec.steps;
    frames += rec.frames_predicted;
  }
  r.trials = completed;
  r.success_rate = completed ? double(r.successes) / completed : 0.0;
  r.mean_steps = completed ? r.mean_steps / completed : 0.0;
  r.wall_clock_s = double(frames) * kSecondsPerPredictedState;
  return out;
}

inline std::unique_ptr<DynamicsModel> make_model(const ExperimentConfig& cfg,
                                                 const InteractionDataset* data) {
  const RasterConfig raster = make_raster(cfg);
  if (cfg.dynamics == "oracle")
    return std::make_unique<OracleDynamics>(raster, cfg.geometry.a_max);
  if (cfg.dynamics == "surrogate") {
    if (!data) throw std::invalid_argument("surrogate backend needs a dataset");
    return std::make_unique<SurrogateModel>(
        fit_surrogate(*data, raster, cfg.geometry.a_max, cfg.knn_k));
  }
  throw std::invalid_argument("unknown dynamics backend: " + cfg.dynamics);
}

inline nlohmann::json episode_json(const CellSpec& cell, std::size_t trial,
                                   const EpisodeRecord& rec) {
  nlohmann::json j;
  j["method"] = to_string(cell.method);
  j["difficulty"] = to_string(cell.difficulty);
  j["trial"] = trial;
  j["scene_seed"] = rec.scene_seed;
  if (rec.failed) {
    j["failed"] = true;
    j["error"] = rec.error;
    return j;
  }
  j["success"] = rec.success;
  j["steps"] = rec.steps;
  j["frames_predicted"] = rec.frames_predicted;
  j["agent"] = {rec.scene.agent.x, rec.scene.agent.y};
  j["goal"] = {rec.scene.goal.x, rec.scene.goal.y};
  j["wall_x"] = rec.scene.layout.wall_x;
  j["gap_y"] = rec.scene.layout.gap_center_y;
  j["latents"] = rec.plan.latents;
  j["subgoal_cost"] = rec.plan.optimized_cost;
  auto pos = nlohmann::json::array();
  for (Vec2 p : rec.plan.positions) pos.push_back({p.x, p.y});
  j["subgoals"] = pos;
  auto traj = nlohmann::json::array();
  for (const MazeState& s : rec.trajectory) traj.push_back({s.agent.x, s.agent.y});
  j["trajectory"] = traj;
  return j;
}

struct BenchOutput {
  ResultTable table;
  std::vector<CellSpec> cells;
  std::vector<CellResult> results;
  double measured_seconds = 0.0;
};

// Shared scaffolding for bench and ablate: run cells in order, then write
// results.csv, episodes.jsonl, summary.md and a bar chart into out_dir.
inline BenchOutput run_cells(const std::vector<CellSpec>& cells,
                             const DynamicsModel& model, const GenerativeModel& gen) {
  BenchOutput out;
  out.cells = cells;
  const auto t0 = std::chrono::steady_clock::now();
  for (const CellSpec& cell : cells) {
    CellResult r = run_cell(cell, model, gen);
    out.table.rows.push_back(r.row);
    out.results.push_back(std::move(r));
  }
  out.measured_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

inline void write_bench_output(const BenchOutput& out, const std::string& out_dir,
                               const std::string& title) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  write_text_file(out_dir + "/results.csv", to_csv(out.table));
  std::string jsonl;
  for (std::size_t c = 0; c < out.cells.size(); ++c)
    for (std::size_t t = 0; t < out.results[c].episodes.size(); ++t)
      jsonl += episode_json(out.cells[c], t, out.results[c].episodes[t]).dump() + "\n";
  write_text_file(out_dir + "/episodes.jsonl", jsonl);
  write_text_file(out_dir + "/summary.md", to_markdown_summary(out.table, title));
  write_text_file(out_dir + "/success.svg", to_svg_bars(out.table, title));
}

// Frame dumps: out_dir/<episode>/<t>.ppm for every trajectory state.
inline void dump_frames(const BenchOutput& out, const RasterConfig& raster,
                        const std::string& out_dir) {
  namespace fs = std::filesystem;
  std::size_t episode_id = 0;
  Frame f;
  for (std::size_t c = 0; c < out.results.size(); ++c) {
    for (const EpisodeRecord& rec : out.results[c].episodes) {
      const fs::path dir = fs::path(out_dir) / std::to_string(episode_id++);
      if (rec.failed) continue;
      fs::create_directories(dir);
      for (std::size_t t = 0; t < rec.trajectory.size(); ++t) {
        render_into(rec.trajectory[t], raster, f);
        write_ppm(f, (dir / (std::to_string(t) + ".ppm")).string());
      }
    }
  }
}

inline std::vector<CellSpec> bench_cells(const ExperimentConfig& cfg,
                                         const std::vector<Method>& methods,
                                         const std::vector<Difficulty>& difficulties) {
  std::vector<CellSpec> cells;
  for (Difficulty d : difficulties)
    for (Method m : methods) cells.push_back({m, d, cfg});
  return cells;
}

// Ablation grids on the hard tier. Axes follow the study design of the
// benchmark being reproduced: subgoal count alone, worst-vs-mean objective,
// and sample / horizon grids crossed with K in {0, 1, 2}.
inline std::vector<CellSpec> ablation_cells(const std::string& which,
                                            const ExperimentConfig& base) {
  std::vector<CellSpec> cells;
  auto push = [&](ExperimentConfig c) {
    const Method m = c.num_subgoals == 0 ? Method::no_subgoal : Method::hvf_planner;
    cells.push_back({m, Difficulty::hard, std::move(c)});
  };
  if (which == "num_subgoals") {
    for (int k : {0, 1, 2, 3, 5, 10}) {
      ExperimentConfig c = base;
      c.num_subgoals = k;
      push(std::move(c));
    }
  } else if (which == "max_vs_mean") {
    for (const char* mode : {"max", "mean"}) {
      ExperimentConfig c = base;
      c.aggregate_mode = mode;
      push(std::move(c));
    }
  } else if (which == "sample_quantity") {
    for (int samples : {200, 1000}) {
      for (int k : {0, 1, 2}) {
        ExperimentConfig c = base;
        c.mpc_samples = samples;
        c.mpc_elites = samples / 5;
        c.num_subgoals = k;
        push(std::move(c));
      }
    }
  } else if (which == "planning_horizon") {
    for (int h : {5, 10, 15}) {
      for (int k : {0, 1, 2}) {
        ExperimentConfig c = base;
        c.mpc_horizon = h;
        c.num_subgoals = k;
        push(std::move(c));
      }
    }
  } else {
    throw std::invalid_argument("unknown ablation: " + which);
  }
  return cells;
}

}  // namespace hvf
