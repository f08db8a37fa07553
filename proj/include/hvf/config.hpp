#pragma once

#include <cstdint>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>

#include "hvf/dataset.hpp"
#include "hvf/hvf.hpp"

namespace hvf {

// Everything an experiment needs, expressed as plain knobs. The file format
// is flat key=value lines ('#' comments); unknown keys are an error so typos
// cannot silently fall back to defaults.
struct ExperimentConfig {
  GeometryConfig geometry;

  int resolution = 32;
  int blob_px = 4;
  int goal_px = 4;
  bool goal_marker = false;  // keep benchmark frames on the clean plateau

  int mpc_horizon = 5;
  int mpc_samples = 200;
  int mpc_elites = 40;
  int mpc_max_iters = 5;
  double mpc_std_threshold = 1e-3;
  bool mpc_aim_candidate = true;

  int num_subgoals = 2;
  std::string aggregate_mode = "max";
  int outer_samples = 200;
  int outer_elites = 40;
  int outer_max_iters = 5;
  double outer_std_threshold = 1e-3;
  int search_samples = 64;
  int search_elites = 13;
  int search_max_iters = 2;
  // Longer lookahead for scoring a segment than for acting in it: the score
  // should reflect whether the leg is feasible at all, and a horizon-5 plan
  // cannot reach far enough to distinguish a good waypoint from the constant
  // cost floor that border-clipped rollouts can reach anywhere.
  int search_horizon = 10;
  int latent_dim = 8;
  int per_subgoal_budget = 10;
  int total_budget = 50;
  double stop_threshold_scale = 0.25;  // of the disjoint-blob plateau
  bool seed_start_latents = false;
  bool seed_gap_latents = false;

  std::string dynamics = "oracle";  // or "surrogate"
  int knn_k = 8;
  int collect_episodes = 500;
  int collect_horizon = 50;

  int trials = 100;
  uint64_t base_seed = 1000;
};

// 64x64 frames, bigger blob, full-scale interaction corpus.
inline void apply_paper_scale(ExperimentConfig& c) {
  c.resolution = 64;
  c.blob_px = 6;
  c.collect_episodes = 10000;
  c.collect_horizon = 100;
}

inline RasterConfig make_raster(const ExperimentConfig& c) {
  RasterConfig r;
  r.resolution = c.resolution;
  r.blob_px = c.blob_px;
  r.goal_px = c.goal_px;
  r.goal_marker = c.goal_marker;
  return r;
}

inline MpcConfig make_mpc(const ExperimentConfig& c) {
  MpcConfig m;
  m.horizon = c.mpc_horizon;
  m.cem = {c.mpc_samples, c.mpc_elites, c.mpc_max_iters, c.mpc_std_threshold, 1e-6};
  m.a_max = c.geometry.a_max;
  m.aim_candidate = c.mpc_aim_candidate;
  return m;
}

inline HvfConfig make_hvf(const ExperimentConfig& c) {
  HvfConfig h;
  h.num_subgoals = c.num_subgoals;
  h.mode = parse_aggregate_mode(c.aggregate_mode);
  h.outer = {c.outer_samples, c.outer_elites, c.outer_max_iters,
             c.outer_std_threshold, 1e-6};
  h.exec = make_mpc(c);
  h.search = h.exec;
  h.search.cem.num_samples = c.search_samples;
  h.search.cem.num_elites = c.search_elites;
  h.search.cem.max_iters = c.search_max_iters;
  h.search.horizon = c.search_horizon;
  h.per_subgoal_budget = c.per_subgoal_budget;
  h.total_budget = c.total_budget;
  h.stop_threshold = c.stop_threshold_scale * plateau_cost(make_raster(c));
  h.success_radius = c.geometry.success_radius;
  h.seed_start_latents = c.seed_start_latents;
  h.seed_gap_latents = c.seed_gap_latents;
  return h;
}

namespace detail {

struct ConfigField {
  std::string key;
  std::function<std::string(const ExperimentConfig&)> get;
  std::function<void(ExperimentConfig&, const std::string&)> set;
};

inline std::string fmt_double(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

inline const std::vector<ConfigField>& config_fields() {
  auto dbl = [](double ExperimentConfig::* f) {
    return ConfigField{"",
                       [f](const ExperimentConfig& c) { return fmt_double(c.*f); },
                       [f](ExperimentConfig& c, const std::string& v) { c.*f = std::stod(v); }};
  };
  auto geo = [](double GeometryConfig::* f) {
    return ConfigField{"",
                       [f](const ExperimentConfig& c) { return fmt_double(c.geometry.*f); },
                       [f](ExperimentConfig& c, const std::string& v) { c.geometry.*f = std::stod(v); }};
  };
  auto integer = [](int ExperimentConfig::* f) {
    return ConfigField{"",
                       [f](const ExperimentConfig& c) { return std::to_string(c.*f); },
                       [f](ExperimentConfig& c, const std::string& v) { c.*f = std::stoi(v); }};
  };
  auto boolean = [](bool ExperimentConfig::* f) {
    return ConfigField{"",
                       [f](const ExperimentConfig& c) { return std::string(c.*f ? "true" : "false"); },
                       [f](ExperimentConfig& c, const std::string& v) {
                         if (v == "true" || v == "1") c.*f = true;
                         else if (v == "false" || v == "0") c.*f = false;
                         else throw std::invalid_argument("bad bool: " + v);
                       }};
  };
  auto text = [](std::string ExperimentConfig::* f) {
    return ConfigField{"",
                       [f](const ExperimentConfig& c) { return c.*f; },
                       [f](ExperimentConfig& c, const std::string& v) { c.*f = v; }};
  };

  static const std::vector<ConfigField> fields = [&] {
    std::vector<ConfigField> fs;
    auto add = [&](std::string key, ConfigField f) {
      f.key = std::move(key);
      fs.push_back(std::move(f));
    };
    add("geometry.wall_x0_min", geo(&GeometryConfig::wall_x0_min));
    add("geometry.wall_x0_max", geo(&GeometryConfig::wall_x0_max));
    add("geometry.wall_x1_min", geo(&GeometryConfig::wall_x1_min));
    add("geometry.wall_x1_max", geo(&GeometryConfig::wall_x1_max));
    add("geometry.gap_half_width", geo(&GeometryConfig::gap_half_width));
    add("geometry.wall_thickness", geo(&GeometryConfig::wall_thickness));
    add("geometry.a_max", geo(&GeometryConfig::a_max));
    add("geometry.success_radius", geo(&GeometryConfig::success_radius));
    add("raster.resolution", integer(&ExperimentConfig::resolution));
    add("raster.blob_px", integer(&ExperimentConfig::blob_px));
    add("raster.goal_px", integer(&ExperimentConfig::goal_px));
    add("raster.goal_marker", boolean(&ExperimentConfig::goal_marker));
    add("mpc.horizon", integer(&ExperimentConfig::mpc_horizon));
    add("mpc.samples", integer(&ExperimentConfig::mpc_samples));
    add("mpc.elites", integer(&ExperimentConfig::mpc_elites));
    add("mpc.max_iters", integer(&ExperimentConfig::mpc_max_iters));
    add("mpc.std_threshold", dbl(&ExperimentConfig::mpc_std_threshold));
    add("mpc.aim_candidate", boolean(&ExperimentConfig::mpc_aim_candidate));
    add("hvf.num_subgoals", integer(&ExperimentConfig::num_subgoals));
    add("hvf.aggregate_mode", text(&ExperimentConfig::aggregate_mode));
    add("hvf.outer_samples", integer(&ExperimentConfig::outer_samples));
    add("hvf.outer_elites", integer(&ExperimentConfig::outer_elites));
    add("hvf.outer_max_iters", integer(&ExperimentConfig::outer_max_iters));
    add("hvf.outer_std_threshold", dbl(&ExperimentConfig::outer_std_threshold));
    add("hvf.search_samples", integer(&ExperimentConfig::search_samples));
    add("hvf.search_elites", integer(&ExperimentConfig::search_elites));
    add("hvf.search_max_iters", integer(&ExperimentConfig::search_max_iters));
    add("hvf.search_horizon", integer(&ExperimentConfig::search_horizon));
    add("hvf.latent_dim", integer(&ExperimentConfig::latent_dim));
    add("hvf.per_subgoal_budget", integer(&ExperimentConfig::per_subgoal_budget));
    add("hvf.total_budget", integer(&ExperimentConfig::total_budget));
    add("hvf.stop_threshold_scale", dbl(&ExperimentConfig::stop_threshold_scale));
    add("hvf.seed_start_latents", boolean(&ExperimentConfig::seed_start_latents));
    add("hvf.seed_gap_latents", boolean(&ExperimentConfig::seed_gap_latents));
    add("dynamics.backend", text(&ExperimentConfig::dynamics));
    add("dynamics.knn_k", integer(&ExperimentConfig::knn_k));
    add("dataset.episodes", integer(&ExperimentConfig::collect_episodes));
    add("dataset.horizon", integer(&ExperimentConfig::collect_horizon));
    add("bench.trials", integer(&ExperimentConfig::trials));
    add("bench.base_seed",
        ConfigField{"",
                    [](const ExperimentConfig& c) { return std::to_string(c.base_seed); },
                    [](ExperimentConfig& c, const std::string& v) { c.base_seed = std::stoull(v); }});
    return fs;
  }();
  return fields;
}

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

}  // namespace detail

inline void set_config_key(ExperimentConfig& c, const std::string& key,
                           const std::string& value) {
  for (const auto& f : detail::config_fields()) {
    if (f.key == key) {
      f.set(c, value);
      return;
    }
  }
  throw std::invalid_argument("unknown config key: " + key);
}

inline ExperimentConfig parse_config_text(const std::string& text) {
  ExperimentConfig c;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config line " + std::to_string(lineno) +
                                  ": expected key=value");
    set_config_key(c, detail::trim(line.substr(0, eq)), detail::trim(line.substr(eq + 1)));
  }
  return c;
}

inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

// Canonical form: every field in declaration order, one per line. Equal
// configs serialize to equal bytes, so the hash identifies the experiment.
inline std::string serialize_config(const ExperimentConfig& c) {
  std::string out;
  for (const auto& f : detail::config_fields()) {
    out += f.key;
    out += '=';
    out += f.get(c);
    out += '\n';
  }
  return out;
}

inline uint64_t config_hash(const ExperimentConfig& c) {
  return fnv1a64(serialize_config(c));
}

}  // namespace hvf
