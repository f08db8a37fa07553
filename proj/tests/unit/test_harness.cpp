#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <string>
#include <vector>

#include <catch2/catch_amalgamated.hpp>
#include "hvf/harness.hpp"

namespace fs = std::filesystem;

namespace {

struct WorkersGuard {
  explicit WorkersGuard(const char* v) { setenv("HVF_WORKERS", v, 1); }
  ~WorkersGuard() { unsetenv("HVF_WORKERS"); }
};

// Small-budget experiment: enough search to solve easy scenes, cheap enough
// to run many cells inside a unit test.
hvf::ExperimentConfig tiny_cfg() {
  hvf::ExperimentConfig c;
  c.trials = 5;
  c.base_seed = 77;
  c.mpc_samples = 30;
  c.mpc_elites = 6;
  c.mpc_max_iters = 2;
  c.outer_samples = 16;
  c.outer_elites = 4;
  c.outer_max_iters = 1;
  c.search_samples = 12;
  c.search_elites = 3;
  c.search_max_iters = 1;
  c.latent_dim = 4;
  c.per_subgoal_budget = 4;
  c.total_budget = 30;
  c.num_subgoals = 1;
  return c;
}

bool same_scene(const hvf::MazeState& a, const hvf::MazeState& b) {
  return a.agent.x == b.agent.x && a.agent.y == b.agent.y && a.goal.x == b.goal.x &&
         a.goal.y == b.goal.y && a.layout.wall_x == b.layout.wall_x &&
         a.layout.gap_center_y == b.layout.gap_center_y &&
         a.layout.gap_half_width == b.layout.gap_half_width &&
         a.layout.wall_thickness == b.layout.wall_thickness;
}

hvf::CellResult run_tiny_cell(hvf::Method m, hvf::Difficulty d,
                              const hvf::ExperimentConfig& cfg) {
  const hvf::RasterConfig raster = make_raster(cfg);
  const hvf::OracleDynamics model(raster, cfg.geometry.a_max);
  const hvf::FreeSpaceDecoder gen(raster, cfg.latent_dim);
  return run_cell({m, d, cfg}, model, gen);
}

const hvf::CellResult& easy_cell(hvf::Method m) {
  static const hvf::CellResult no_sub = run_tiny_cell(
      hvf::Method::no_subgoal, hvf::Difficulty::easy, tiny_cfg());
  static const hvf::CellResult planner = run_tiny_cell(
      hvf::Method::hvf_planner, hvf::Difficulty::easy, tiny_cfg());
  return m == hvf::Method::no_subgoal ? no_sub : planner;
}

fs::path fresh_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / name;
  fs::remove_all(p);
  return p;
}

// Wilson endpoints are the roots of (p_hat - p)^2 = z^2 p (1 - p) / n,
// i.e. of (n + z^2) p^2 - (2 n p_hat + z^2) p + n p_hat^2 = 0.
std::pair<double, double> wilson_roots(int s, int n) {
  const double z = 1.959963984540054;
  const double nn = n, ph = double(s) / nn;
  const double a = nn + z * z, b = 2 * nn * ph + z * z, c = nn * ph * ph;
  const double disc = std::sqrt(b * b - 4 * a * c);
  return {(b - disc) / (2 * a), (b + disc) / (2 * a)};
}

}  // namespace

TEST_CASE("config: serialize/parse round-trip preserves every field", "[harness]") {
  hvf::ExperimentConfig c;
  set_config_key(c, "hvf.aggregate_mode", "mean");
  set_config_key(c, "raster.resolution", "64");
  set_config_key(c, "raster.goal_marker", "true");
  set_config_key(c, "geometry.a_max", "0.04");
  set_config_key(c, "hvf.stop_threshold_scale", "0.3");
  set_config_key(c, "dynamics.backend", "surrogate");
  set_config_key(c, "bench.base_seed", "424242");

  const std::string text = serialize_config(c);
  const hvf::ExperimentConfig back = hvf::parse_config_text(text);
  CHECK(serialize_config(back) == text);
  CHECK(config_hash(back) == config_hash(c));
  CHECK(back.aggregate_mode == "mean");
  CHECK(back.resolution == 64);
  CHECK(back.goal_marker);
  CHECK(back.geometry.a_max == 0.04);
  CHECK(back.dynamics == "surrogate");
  CHECK(back.base_seed == 424242ull);

  // defaults survive the trip too
  const hvf::ExperimentConfig d;
  CHECK(config_hash(hvf::parse_config_text(serialize_config(d))) == config_hash(d));
}

TEST_CASE("config: file load matches in-memory parse", "[harness]") {
  hvf::ExperimentConfig c;
  set_config_key(c, "mpc.horizon", "7");
  const fs::path p = fs::temp_directory_path() / "hvf_test_config.txt";
  hvf::write_text_file(p.string(), serialize_config(c));
  const hvf::ExperimentConfig loaded = hvf::load_config(p.string());
  CHECK(config_hash(loaded) == config_hash(c));
  CHECK(loaded.mpc_horizon == 7);
  fs::remove(p);
  CHECK_THROWS_AS(hvf::load_config((p / "missing").string()), std::runtime_error);
}

TEST_CASE("config: comments, blanks and spacing are tolerated", "[harness]") {
  const hvf::ExperimentConfig c = hvf::parse_config_text(
      "# a comment line\n"
      "\n"
      "  mpc.horizon = 9   # trailing note\n"
      "hvf.num_subgoals=3\n");
  CHECK(c.mpc_horizon == 9);
  CHECK(c.num_subgoals == 3);
  CHECK(c.mpc_samples == 200);  // untouched fields keep defaults
}

TEST_CASE("config: bad keys, values and lines are rejected", "[harness]") {
  hvf::ExperimentConfig c;
  CHECK_THROWS_AS(set_config_key(c, "mpc.horzon", "5"), std::invalid_argument);
  CHECK_THROWS_AS(set_config_key(c, "raster.goal_marker", "maybe"), std::invalid_argument);
  CHECK_THROWS_AS(hvf::parse_config_text("mpc.horizon 5\n"), std::invalid_argument);
  CHECK_THROWS_AS(hvf::parse_config_text("unknown.key=1\n"), std::invalid_argument);
}

TEST_CASE("config: hash tracks content", "[harness]") {
  const hvf::ExperimentConfig a;
  hvf::ExperimentConfig b;
  CHECK(config_hash(a) == config_hash(b));
  b.num_subgoals = 3;
  CHECK(config_hash(a) != config_hash(b));
  hvf::ExperimentConfig p;
  hvf::apply_paper_scale(p);
  CHECK(config_hash(p) != config_hash(a));
}

TEST_CASE("config: full-scale preset", "[harness]") {
  hvf::ExperimentConfig c;
  hvf::apply_paper_scale(c);
  CHECK(c.resolution == 64);
  CHECK(c.blob_px == 6);
  CHECK(c.collect_episodes == 10000);
  CHECK(c.collect_horizon == 100);
  // planner knobs are scale-independent
  CHECK(c.mpc_samples == 200);
  CHECK(c.num_subgoals == 2);
}

TEST_CASE("config: derived planner wiring", "[harness]") {
  const hvf::ExperimentConfig c;
  const hvf::HvfConfig h = make_hvf(c);
  CHECK(h.num_subgoals == 2);
  CHECK(h.mode == hvf::AggregateMode::max);
  CHECK(h.outer.num_samples == 200);
  CHECK(h.outer.num_elites == 40);
  CHECK(h.exec.horizon == c.mpc_horizon);
  CHECK(h.exec.cem.num_samples == c.mpc_samples);
  CHECK(h.exec.a_max == c.geometry.a_max);
  // subgoal-evaluation search runs a reduced profile of the execution planner
  CHECK(h.search.horizon == h.exec.horizon);
  CHECK(h.search.cem.num_samples == 64);
  CHECK(h.search.cem.num_elites == 13);
  CHECK(h.search.cem.max_iters == 2);
  CHECK(h.per_subgoal_budget == 10);
  CHECK(h.total_budget == 50);
  CHECK(h.stop_threshold == 0.25 * plateau_cost(make_raster(c)));
  CHECK(h.success_radius == c.geometry.success_radius);
}

TEST_CASE("report: csv header and row formatting are exact", "[harness]") {
  CHECK(std::string(hvf::kResultsHeader) ==
        "method,difficulty,k,mode,samples,horizon,success_rate,mean_steps,wall_clock_s");
  hvf::ResultTable t;
  hvf::ResultRow r;
  r.method = "hvf";
  r.difficulty = "hard";
  r.k = 2;
  r.mode = "max";
  r.samples = 200;
  r.horizon = 5;
  r.success_rate = 0.54;
  r.mean_steps = 33.25;
  r.wall_clock_s = 1.5;
  t.rows.push_back(r);
  CHECK(to_csv(t) == std::string(hvf::kResultsHeader) +
                         "\nhvf,hard,2,max,200,5,0.5400,33.2500,1.5000\n");
}

TEST_CASE("report: csv parse round-trip and error cases", "[harness]") {
  hvf::ResultTable t;
  for (int k : {0, 1, 2}) {
    hvf::ResultRow r;
    r.method = k == 0 ? "no_subgoal" : "hvf";
    r.difficulty = "medium";
    r.k = k;
    r.mode = "mean";
    r.samples = 1000;
    r.horizon = 10;
    r.success_rate = 0.125 * k;
    r.mean_steps = 10.0 + k;
    r.wall_clock_s = 0.25 + k;
    t.rows.push_back(r);
  }
  const std::string csv = to_csv(t);
  const hvf::ResultTable back = hvf::parse_results_csv(csv);
  REQUIRE(back.rows.size() == 3);
  CHECK(to_csv(back) == csv);
  CHECK(back.rows[2].success_rate == 0.25);
  CHECK(back.rows[1].method == "hvf");

  CHECK_THROWS_AS(hvf::parse_results_csv("not,a,header\n"), std::invalid_argument);
  CHECK_THROWS_AS(
      hvf::parse_results_csv(std::string(hvf::kResultsHeader) + "\nhvf,hard,2\n"),
      std::invalid_argument);
}

TEST_CASE("report: wilson interval matches its quadratic-root form", "[harness]") {
  for (auto [s, n] : {std::pair{50, 100}, {0, 10}, {10, 10}, {3, 7}, {97, 100}, {1, 400}}) {
    const auto [lo, hi] = hvf::wilson_interval(s, n);
    const auto [rlo, rhi] = wilson_roots(s, n);
    CHECK(lo == Catch::Approx(rlo).margin(1e-12));
    CHECK(hi == Catch::Approx(rhi).margin(1e-12));
    CHECK(lo >= 0.0);
    CHECK(hi <= 1.0);
    CHECK(lo < hi);
    const double p = double(s) / n;
    CHECK(lo <= p);
    CHECK(hi >= p);
  }
  CHECK(hvf::wilson_interval(0, 0) == std::pair{0.0, 1.0});
}

TEST_CASE("report: reference success lookup", "[harness]") {
  auto row = [](std::string diff, int k, std::string mode, int samples, int horizon) {
    hvf::ResultRow r;
    r.difficulty = std::move(diff);
    r.k = k;
    r.mode = std::move(mode);
    r.samples = samples;
    r.horizon = horizon;
    return r;
  };
  CHECK(reference_success(row("hard", 0, "max", 200, 5)) == 0.33);
  CHECK(reference_success(row("hard", 2, "max", 200, 5)) == 0.54);
  CHECK(reference_success(row("hard", 10, "max", 200, 5)) == 0.00);
  CHECK(reference_success(row("hard", 2, "mean", 200, 5)) == 0.53);
  CHECK(reference_success(row("hard", 1, "max", 1000, 5)) == 0.54);
  CHECK(reference_success(row("hard", 2, "max", 200, 15)) == 0.24);
  CHECK_FALSE(reference_success(row("easy", 2, "max", 200, 5)).has_value());
  CHECK_FALSE(reference_success(row("hard", 7, "max", 200, 5)).has_value());
}

TEST_CASE("report: markdown and svg render every row", "[harness]") {
  hvf::ResultTable t;
  hvf::ResultRow r;
  r.method = "hvf";
  r.difficulty = "hard";
  r.k = 2;
  r.mode = "max";
  r.samples = 200;
  r.horizon = 5;
  r.success_rate = 0.5;
  r.successes = 3;
  r.trials = 6;
  t.rows.push_back(r);
  r.method = "no_subgoal";
  r.k = 0;
  r.complete = false;
  t.rows.push_back(r);

  const std::string md = to_markdown_summary(t, "demo");
  CHECK(md.find("# demo") != std::string::npos);
  CHECK(md.find("| hvf | hard | 2 |") != std::string::npos);
  CHECK(md.find("(incomplete)") != std::string::npos);

  const std::string svg = to_svg_bars(t, "demo");
  CHECK(svg.rfind("<svg", 0) == 0);
  CHECK(svg.find("</svg>") != std::string::npos);
  CHECK(svg.find("hvf k=2") != std::string::npos);
  const std::string labeled =
      to_svg_bars(t, "demo", [](const hvf::ResultRow& x) { return x.difficulty; });
  CHECK(labeled.find(">hard<") != std::string::npos);
}

TEST_CASE("methods: names round-trip", "[harness]") {
  for (hvf::Method m : {hvf::Method::no_subgoal, hvf::Method::hvf_planner,
                        hvf::Method::gt_bottleneck})
    CHECK(hvf::parse_method(hvf::to_string(m)) == m);
  CHECK_THROWS_AS(hvf::parse_method("cem"), std::invalid_argument);
}

TEST_CASE("collect: reproducible and worker-count independent", "[harness]") {
  hvf::ExperimentConfig c;
  c.collect_episodes = 8;
  c.collect_horizon = 6;
  uint64_t serial_hash = 0;
  {
    WorkersGuard g("1");
    serial_hash = dataset_content_hash(collect(c, 99));
    CHECK(dataset_content_hash(collect(c, 99)) == serial_hash);
    CHECK(dataset_content_hash(collect(c, 100)) != serial_hash);
  }
  {
    WorkersGuard g("5");
    CHECK(dataset_content_hash(collect(c, 99)) == serial_hash);
  }
}

TEST_CASE("collect: episode shapes and bounds", "[harness]") {
  hvf::ExperimentConfig c;
  c.collect_episodes = 8;
  c.collect_horizon = 6;
  const hvf::InteractionDataset d = collect(c, 5);
  REQUIRE(d.episodes.size() == 8);
  CHECK(d.horizon == 6);
  CHECK(d.transition_count() == 48);
  for (const hvf::Episode& ep : d.episodes) {
    REQUIRE(ep.positions.size() == 7);
    REQUIRE(ep.actions.size() == 6);
    for (const hvf::Action& a : ep.actions) {
      CHECK(std::abs(a.delta.x) <= c.geometry.a_max);
      CHECK(std::abs(a.delta.y) <= c.geometry.a_max);
    }
    for (hvf::Vec2 p : ep.positions) {
      CHECK(hvf::in_arena(p));
      CHECK_FALSE(in_wall(ep.layout, p));
    }
  }
}

TEST_CASE("dataset manifest is stable and complete", "[harness]") {
  hvf::ExperimentConfig c;
  c.collect_episodes = 4;
  c.collect_horizon = 3;
  const hvf::InteractionDataset d = collect(c, 11);
  const nlohmann::json j = dataset_manifest(d, c);
  CHECK(j["seed"] == 11);
  CHECK(j["episodes"] == 4);
  CHECK(j["horizon"] == 3);
  CHECK(j["transitions"] == 12);
  CHECK(j["content_hash"] == dataset_content_hash(d));
  CHECK(j["config_hash"] == config_hash(c));
  CHECK(dataset_manifest(d, c).dump() == j.dump());
}

TEST_CASE("run_cell: every method sees the same scenes", "[harness]") {
  const hvf::CellResult& a = easy_cell(hvf::Method::no_subgoal);
  const hvf::CellResult& b = easy_cell(hvf::Method::hvf_planner);
  REQUIRE(a.episodes.size() == 5);
  REQUIRE(b.episodes.size() == 5);
  for (std::size_t t = 0; t < a.episodes.size(); ++t) {
    CHECK(a.episodes[t].scene_seed == b.episodes[t].scene_seed);
    CHECK(same_scene(a.episodes[t].scene, b.episodes[t].scene));
  }
  // trials get distinct scenes
  CHECK_FALSE(same_scene(a.episodes[0].scene, a.episodes[1].scene));
}

TEST_CASE("run_cell: reruns are identical", "[harness]") {
  const hvf::CellResult& first = easy_cell(hvf::Method::hvf_planner);
  const hvf::CellResult again =
      run_tiny_cell(hvf::Method::hvf_planner, hvf::Difficulty::easy, tiny_cfg());
  hvf::ResultTable ta, tb;
  ta.rows.push_back(first.row);
  tb.rows.push_back(again.row);
  CHECK(to_csv(ta) == to_csv(tb));
  REQUIRE(again.episodes.size() == first.episodes.size());
  for (std::size_t t = 0; t < again.episodes.size(); ++t) {
    CHECK(again.episodes[t].plan.latents == first.episodes[t].plan.latents);
    CHECK(again.episodes[t].steps == first.episodes[t].steps);
    CHECK(again.episodes[t].success == first.episodes[t].success);
    CHECK(again.episodes[t].frames_predicted == first.episodes[t].frames_predicted);
  }
}

TEST_CASE("run_cell: row bookkeeping matches the episode records", "[harness]") {
  const hvf::CellResult& r = easy_cell(hvf::Method::hvf_planner);
  int successes = 0, steps = 0;
  uint64_t frames = 0;
  for (const hvf::EpisodeRecord& rec : r.episodes) {
    REQUIRE_FALSE(rec.failed);
    successes += rec.success ? 1 : 0;
    steps += rec.steps;
    frames += rec.frames_predicted;
    CHECK(rec.frames_predicted > 0);
    CHECK(rec.trajectory.size() == std::size_t(rec.steps) + 1);
  }
  CHECK(r.row.method == "hvf");
  CHECK(r.row.difficulty == "easy");
  CHECK(r.row.k == 1);
  CHECK(r.row.mode == "max");
  CHECK(r.row.samples == 30);
  CHECK(r.row.horizon == 5);
  CHECK(r.row.trials == 5);
  CHECK(r.row.complete);
  CHECK(r.row.successes == successes);
  CHECK(r.row.success_rate == double(successes) / 5.0);
  CHECK(r.row.mean_steps == Catch::Approx(steps / 5.0));
  CHECK(r.row.wall_clock_s == double(frames) * hvf::kSecondsPerPredictedState);
  CHECK(hvf::kSecondsPerPredictedState == 2e-6);
}

TEST_CASE("run_cell: method-specific subgoal counts", "[harness]") {
  hvf::ExperimentConfig c = tiny_cfg();
  c.trials = 2;
  const hvf::CellResult no_sub =
      run_tiny_cell(hvf::Method::no_subgoal, hvf::Difficulty::easy, c);
  CHECK(no_sub.row.k == 0);
  CHECK(no_sub.row.method == "no_subgoal");
  for (const auto& rec : no_sub.episodes) CHECK(rec.plan.latents.empty());

  // the oracle-waypoint baseline overrides K per difficulty
  const hvf::CellResult gt_med =
      run_tiny_cell(hvf::Method::gt_bottleneck, hvf::Difficulty::medium, c);
  CHECK(gt_med.row.k == 1);
  CHECK(gt_med.row.method == "gt_bottleneck");
  const hvf::CellResult gt_hard =
      run_tiny_cell(hvf::Method::gt_bottleneck, hvf::Difficulty::hard, c);
  CHECK(gt_hard.row.k == 2);
  for (const auto& rec : gt_hard.episodes)
    CHECK(rec.plan.positions.size() == 2);
}

TEST_CASE("run_cell: episode failures are isolated", "[harness]") {
  hvf::ExperimentConfig c = tiny_cfg();
  c.trials = 2;
  c.mpc_elites = c.mpc_samples + 1;  // invalid planner profile: every episode throws
  const hvf::CellResult r =
      run_tiny_cell(hvf::Method::no_subgoal, hvf::Difficulty::easy, c);
  REQUIRE(r.episodes.size() == 2);
  for (const auto& rec : r.episodes) {
    CHECK(rec.failed);
    CHECK_FALSE(rec.error.empty());
    const nlohmann::json j = episode_json({hvf::Method::no_subgoal, hvf::Difficulty::easy, c},
                                          0, rec);
    CHECK(j["failed"] == true);
    CHECK(j.contains("error"));
    CHECK_FALSE(j.contains("success"));
  }
  CHECK_FALSE(r.row.complete);
  CHECK(r.row.trials == 0);
  CHECK(r.row.success_rate == 0.0);
}

TEST_CASE("run_cell: easy scenes are mostly solvable", "[harness]") {
  const hvf::CellResult& r = easy_cell(hvf::Method::no_subgoal);
  CHECK(r.row.successes >= 2);
}

TEST_CASE("episode json carries the planner evidence", "[harness]") {
  const hvf::CellResult& r = easy_cell(hvf::Method::hvf_planner);
  const hvf::EpisodeRecord& rec = r.episodes[0];
  const nlohmann::json j =
      episode_json({hvf::Method::hvf_planner, hvf::Difficulty::easy, tiny_cfg()}, 3, rec);
  CHECK(j["method"] == "hvf");
  CHECK(j["difficulty"] == "easy");
  CHECK(j["trial"] == 3);
  CHECK(j["scene_seed"] == rec.scene_seed);
  CHECK(j["success"] == rec.success);
  CHECK(j["latents"].size() == rec.plan.latents.size());
  CHECK(j["subgoals"].size() == 1);
  CHECK(j["trajectory"].size() == rec.trajectory.size());
  CHECK(j["wall_x"].size() == 2);
}

TEST_CASE("bench cells enumerate difficulty-major", "[harness]") {
  const hvf::ExperimentConfig cfg;
  const auto cells = bench_cells(cfg, {hvf::Method::no_subgoal, hvf::Method::hvf_planner},
                                 {hvf::Difficulty::easy, hvf::Difficulty::hard});
  REQUIRE(cells.size() == 4);
  CHECK(cells[0].method == hvf::Method::no_subgoal);
  CHECK(cells[0].difficulty == hvf::Difficulty::easy);
  CHECK(cells[1].method == hvf::Method::hvf_planner);
  CHECK(cells[1].difficulty == hvf::Difficulty::easy);
  CHECK(cells[3].method == hvf::Method::hvf_planner);
  CHECK(cells[3].difficulty == hvf::Difficulty::hard);
}

TEST_CASE("ablation grids", "[harness]") {
  const hvf::ExperimentConfig base;

  const auto ks = ablation_cells("num_subgoals", base);
  REQUIRE(ks.size() == 6);
  const std::vector<int> want_k{0, 1, 2, 3, 5, 10};
  for (std::size_t i = 0; i < ks.size(); ++i) {
    CHECK(ks[i].cfg.num_subgoals == want_k[i]);
    CHECK(ks[i].difficulty == hvf::Difficulty::hard);
    CHECK(ks[i].method == (want_k[i] == 0 ? hvf::Method::no_subgoal
                                          : hvf::Method::hvf_planner));
  }

  const auto modes = ablation_cells("max_vs_mean", base);
  REQUIRE(modes.size() == 2);
  CHECK(modes[0].cfg.aggregate_mode == "max");
  CHECK(modes[1].cfg.aggregate_mode == "mean");

  const auto samples = ablation_cells("sample_quantity", base);
  REQUIRE(samples.size() == 6);
  CHECK(samples[0].cfg.mpc_samples == 200);
  CHECK(samples[0].cfg.mpc_elites == 40);
  CHECK(samples[0].cfg.num_subgoals == 0);
  CHECK(samples[3].cfg.mpc_samples == 1000);
  CHECK(samples[3].cfg.mpc_elites == 200);
  CHECK(samples[5].cfg.num_subgoals == 2);

  const auto horizons = ablation_cells("planning_horizon", base);
  REQUIRE(horizons.size() == 9);
  CHECK(horizons[0].cfg.mpc_horizon == 5);
  CHECK(horizons[4].cfg.mpc_horizon == 10);
  CHECK(horizons[4].cfg.num_subgoals == 1);
  CHECK(horizons[8].cfg.mpc_horizon == 15);
  CHECK(horizons[8].cfg.num_subgoals == 2);

  CHECK_THROWS_AS(ablation_cells("frobnicate", base), std::invalid_argument);
}

TEST_CASE("run_cells writes a reproducible bundle", "[harness]") {
  hvf::ExperimentConfig c = tiny_cfg();
  c.trials = 3;
  const hvf::RasterConfig raster = make_raster(c);
  const hvf::OracleDynamics model(raster, c.geometry.a_max);
  const hvf::FreeSpaceDecoder gen(raster, c.latent_dim);
  const auto cells = bench_cells(c, {hvf::Method::hvf_planner}, {hvf::Difficulty::easy});

  const fs::path dir = fresh_dir("hvf_test_bundle");
  const hvf::BenchOutput out = run_cells(cells, model, gen);
  write_bench_output(out, dir.string(), "tiny bench");
  for (const char* name : {"results.csv", "episodes.jsonl", "summary.md", "success.svg"})
    CHECK(fs::exists(dir / name));

  const std::string csv = hvf::read_text_file((dir / "results.csv").string());
  const hvf::ResultTable t = hvf::parse_results_csv(csv);
  REQUIRE(t.rows.size() == 1);
  CHECK(t.rows[0].method == "hvf");
  const std::string jsonl = hvf::read_text_file((dir / "episodes.jsonl").string());
  CHECK(std::count(jsonl.begin(), jsonl.end(), '\n') == 3);

  // a rerun of the whole pipeline produces identical bytes
  const fs::path dir2 = fresh_dir("hvf_test_bundle2");
  write_bench_output(run_cells(cells, model, gen), dir2.string(), "tiny bench");
  for (const char* name : {"results.csv", "episodes.jsonl", "summary.md", "success.svg"})
    CHECK(hvf::read_text_file((dir / name).string()) ==
          hvf::read_text_file((dir2 / name).string()));
  fs::remove_all(dir);
  fs::remove_all(dir2);
}

TEST_CASE("dump_frames writes one image per trajectory state", "[harness]") {
  hvf::ExperimentConfig c = tiny_cfg();
  c.trials = 2;
  const hvf::RasterConfig raster = make_raster(c);
  const hvf::OracleDynamics model(raster, c.geometry.a_max);
  const hvf::FreeSpaceDecoder gen(raster, c.latent_dim);
  const hvf::BenchOutput out = run_cells(
      bench_cells(c, {hvf::Method::no_subgoal}, {hvf::Difficulty::easy}), model, gen);

  const fs::path dir = fresh_dir("hvf_test_frames");
  dump_frames(out, raster, dir.string());
  for (std::size_t e = 0; e < 2; ++e) {
    const auto& rec = out.results[0].episodes[e];
    std::size_t files = 0;
    for ([[maybe_unused]] const auto& f : fs::directory_iterator(dir / std::to_string(e)))
      ++files;
    CHECK(files == rec.trajectory.size());
    CHECK(fs::exists(dir / std::to_string(e) / "0.ppm"));
  }
  fs::remove_all(dir);
}

TEST_CASE("make_model: backends and their errors", "[harness]") {
  hvf::ExperimentConfig c;
  c.collect_episodes = 25;
  c.collect_horizon = 50;

  const auto oracle = make_model(c, nullptr);
  const hvf::MazeState s{{0.2, 0.3}, {0.8, 0.8}, {{0.4, 0.7}, {0.5, 0.5}, 0.07, 0.04}};
  hvf::Frame f;
  oracle->start_frame(s, f);
  CHECK(pixel_cost(f, render(s, make_raster(c))) == 0.0);

  c.dynamics = "surrogate";
  CHECK_THROWS_AS(make_model(c, nullptr), std::invalid_argument);
  const hvf::InteractionDataset data = collect(c, 3);
  const auto surrogate = make_model(c, &data);
  surrogate->start_frame(s, f);
  CHECK(pixel_cost(f, render(s, make_raster(c))) == 0.0);

  c.dynamics = "learned";
  CHECK_THROWS_AS(make_model(c, &data), std::invalid_argument);
}
