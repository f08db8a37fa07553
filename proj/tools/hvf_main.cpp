// Command-line front end: collect interaction data, fit the surrogate, plan
// single episodes, and run benchmark / ablation sweeps.

#include <filesystem>
#include <iostream>
#include <optional>

#include <CLI11.hpp>
#include <json.hpp>

#include "hvf/harness.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CommonOpts {
  std::string config_path;
  std::optional<uint64_t> seed;
  std::optional<int> trials;
  std::optional<int> k;
  std::optional<std::string> mode;
  std::optional<std::string> dynamics;
  bool paper_scale = false;
  bool dump_frames = false;
  std::string out_dir = "out";
  std::string dataset_path;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--config", o.config_path, "key=value config file");
  cmd->add_option("--seed", o.seed, "base seed override");
  cmd->add_option("--trials", o.trials, "trials per benchmark cell");
  cmd->add_option("--k", o.k, "subgoal count override");
  cmd->add_option("--mode", o.mode, "segment aggregate: max or mean")
      ->check(CLI::IsMember({"max", "mean"}));
  cmd->add_option("--dynamics", o.dynamics, "dynamics backend")
      ->check(CLI::IsMember({"oracle", "surrogate"}));
  cmd->add_flag("--paper-scale", o.paper_scale, "64x64 frames, full-size corpus");
  cmd->add_flag("--dump-frames", o.dump_frames, "write trajectory frames as PPM");
  cmd->add_option("--out", o.out_dir, "output directory");
  cmd->add_option("--dataset", o.dataset_path, "interaction dataset (.bin)");
}

// Dumped frames are for people: show the goal even when planning frames don't.
hvf::RasterConfig visual_raster(const hvf::ExperimentConfig& cfg) {
  hvf::RasterConfig r = hvf::make_raster(cfg);
  r.goal_marker = true;
  return r;
}

hvf::ExperimentConfig resolve_config(const CommonOpts& o) {
  hvf::ExperimentConfig cfg;
  if (!o.config_path.empty()) cfg = hvf::load_config(o.config_path);
  if (o.paper_scale) hvf::apply_paper_scale(cfg);
  if (o.seed) cfg.base_seed = *o.seed;
  if (o.trials) cfg.trials = *o.trials;
  if (o.k) cfg.num_subgoals = *o.k;
  if (o.mode) cfg.aggregate_mode = *o.mode;
  if (o.dynamics) cfg.dynamics = *o.dynamics;
  return cfg;
}

// Loads the dataset named on the command line, or collects one in memory when
// the surrogate backend is requested without a corpus on disk.
std::optional<hvf::InteractionDataset> resolve_dataset(const CommonOpts& o,
                                                       const hvf::ExperimentConfig& cfg) {
  if (!o.dataset_path.empty()) return hvf::load_dataset(o.dataset_path);
  if (cfg.dynamics != "surrogate") return std::nullopt;
  std::cerr << "no --dataset given; collecting " << cfg.collect_episodes
            << " episodes in memory\n";
  return hvf::collect(cfg, cfg.base_seed);
}

int cmd_collect(const CommonOpts& o) {
  const hvf::ExperimentConfig cfg = resolve_config(o);
  const hvf::InteractionDataset data = hvf::collect(cfg, cfg.base_seed);
  fs::create_directories(o.out_dir);
  const std::string bin = o.out_dir + "/dataset.bin";
  hvf::save_dataset(data, bin);
  hvf::write_text_file(o.out_dir + "/manifest.json",
                       hvf::dataset_manifest(data, cfg).dump(2) + "\n");
  std::cout << "wrote " << bin << ": " << data.episodes.size() << " episodes, "
            << data.transition_count() << " transitions, content hash "
            << hvf::dataset_content_hash(data) << "\n";
  return 0;
}

int cmd_fit_surrogate(const CommonOpts& o) {
  const hvf::ExperimentConfig cfg = resolve_config(o);
  if (o.dataset_path.empty()) throw std::invalid_argument("fit-surrogate needs --dataset");
  const hvf::InteractionDataset data = hvf::load_dataset(o.dataset_path);
  const hvf::SurrogateModel m =
      hvf::fit_surrogate(data, hvf::make_raster(cfg), cfg.geometry.a_max, cfg.knn_k);
  json j;
  j["dataset"] = o.dataset_path;
  j["dataset_content_hash"] = hvf::dataset_content_hash(data);
  j["knn_k"] = m.k();
  j["a_max"] = m.a_max();
  j["training_samples"] = m.sample_count();
  j["held_out_error"] = m.held_out_error();
  fs::create_directories(o.out_dir);
  hvf::write_text_file(o.out_dir + "/surrogate.json", j.dump(2) + "\n");
  std::cout << "surrogate fit on " << m.sample_count() << " tuples, held-out error "
            << m.held_out_error() << " (mean displacement)\n";
  return 0;
}

int cmd_plan(const CommonOpts& o, const std::string& difficulty) {
  const hvf::ExperimentConfig cfg = resolve_config(o);
  const auto data = resolve_dataset(o, cfg);
  const auto model = hvf::make_model(cfg, data ? &*data : nullptr);
  const hvf::FreeSpaceDecoder gen(hvf::make_raster(cfg), cfg.latent_dim);

  hvf::CellSpec cell{cfg.num_subgoals == 0 ? hvf::Method::no_subgoal
                                           : hvf::Method::hvf_planner,
                     hvf::parse_difficulty(difficulty), cfg};
  cell.cfg.trials = 1;
  hvf::BenchOutput out = hvf::run_cells({cell}, *model, gen);
  const hvf::EpisodeRecord& rec = out.results[0].episodes[0];
  if (rec.failed) {
    std::cerr << "episode failed: " << rec.error << "\n";
    return 1;
  }

  fs::create_directories(o.out_dir);
  json j = hvf::episode_json(cell, 0, rec);
  j["optimized_cost"] = rec.plan.optimized_cost;
  hvf::write_text_file(o.out_dir + "/plan.json", j.dump(2) + "\n");
  if (o.dump_frames) hvf::dump_frames(out, visual_raster(cfg), o.out_dir + "/frames");
  std::cout << "difficulty " << difficulty << ", k=" << cfg.num_subgoals << ": "
            << (rec.success ? "success" : "failure") << " in " << rec.steps
            << " steps; wrote " << o.out_dir << "/plan.json\n";
  return 0;
}

int run_and_write(const std::vector<hvf::CellSpec>& cells, const CommonOpts& o,
                  const hvf::ExperimentConfig& cfg, const std::string& title) {
  const auto data = resolve_dataset(o, cfg);
  const auto model = hvf::make_model(cfg, data ? &*data : nullptr);
  const hvf::FreeSpaceDecoder gen(hvf::make_raster(cfg), cfg.latent_dim);
  hvf::BenchOutput out = hvf::run_cells(cells, *model, gen);
  hvf::write_bench_output(out, o.out_dir, title);
  if (o.dump_frames) hvf::dump_frames(out, visual_raster(cfg), o.out_dir + "/frames");
  std::cout << hvf::to_csv(out.table);
  std::cout << "measured wall time: " << out.measured_seconds << "s; outputs in "
            << o.out_dir << "\n";
  bool complete = true;
  for (const auto& row : out.table.rows) complete = complete && row.complete;
  return complete ? 0 : 1;
}

int cmd_bench(const CommonOpts& o, const std::string& methods_csv,
              const std::string& difficulty) {
  const hvf::ExperimentConfig cfg = resolve_config(o);
  std::vector<hvf::Method> methods;
  std::stringstream ms(methods_csv);
  std::string item;
  while (std::getline(ms, item, ',')) methods.push_back(hvf::parse_method(item));
  std::vector<hvf::Difficulty> difficulties;
  if (difficulty == "all")
    difficulties = {hvf::Difficulty::easy, hvf::Difficulty::medium, hvf::Difficulty::hard};
  else
    difficulties = {hvf::parse_difficulty(difficulty)};
  return run_and_write(hvf::bench_cells(cfg, methods, difficulties), o, cfg, "benchmark");
}

int cmd_ablate(const CommonOpts& o, const std::string& which) {
  const hvf::ExperimentConfig cfg = resolve_config(o);
  return run_and_write(hvf::ablation_cells(which, cfg), o, cfg, "ablation: " + which);
}

int cmd_report(const std::string& in_csv, const std::string& out_dir) {
  const hvf::ResultTable t = hvf::parse_results_csv(hvf::read_text_file(in_csv));
  fs::create_directories(out_dir);
  hvf::write_text_file(out_dir + "/summary.md", hvf::to_markdown_summary(t, "report"));
  hvf::write_text_file(out_dir + "/success.svg", hvf::to_svg_bars(t, "report"));
  std::cout << "wrote " << out_dir << "/summary.md and success.svg\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hierarchical visual foresight on a 2d maze"};
  app.require_subcommand(1);

  CommonOpts collect_o, fit_o, plan_o, bench_o, ablate_o;
  std::string plan_difficulty = "hard";
  std::string bench_methods = "no_subgoal,hvf,gt_bottleneck";
  std::string bench_difficulty = "all";
  std::string ablate_which;
  std::string report_in, report_out = "out";

  add_common(app.add_subcommand("collect", "record random-interaction episodes"), collect_o);
  add_common(app.add_subcommand("fit-surrogate", "fit the k-NN dynamics model"), fit_o);

  CLI::App* plan = app.add_subcommand("plan", "plan and execute one episode");
  add_common(plan, plan_o);
  plan->add_option("--difficulty", plan_difficulty, "easy|medium|hard")
      ->check(CLI::IsMember({"easy", "medium", "hard"}));

  CLI::App* bench = app.add_subcommand("bench", "run benchmark cells");
  add_common(bench, bench_o);
  bench->add_option("--methods", bench_methods, "comma list of methods");
  bench->add_option("--difficulty", bench_difficulty, "easy|medium|hard|all")
      ->check(CLI::IsMember({"easy", "medium", "hard", "all"}));

  CLI::App* ablate = app.add_subcommand("ablate", "run an ablation sweep");
  add_common(ablate, ablate_o);
  ablate->add_option("--which", ablate_which, "ablation axis")
      ->required()
      ->check(CLI::IsMember(
          {"num_subgoals", "max_vs_mean", "sample_quantity", "planning_horizon"}));

  CLI::App* report = app.add_subcommand("report", "re-render summary from results.csv");
  report->add_option("--in", report_in, "results.csv path")->required();
  report->add_option("--out", report_out, "output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand("collect")) return cmd_collect(collect_o);
    if (app.got_subcommand("fit-surrogate")) return cmd_fit_surrogate(fit_o);
    if (app.got_subcommand("plan")) return cmd_plan(plan_o, plan_difficulty);
    if (app.got_subcommand("bench")) return cmd_bench(bench_o, bench_methods, bench_difficulty);
    if (app.got_subcommand("ablate")) return cmd_ablate(ablate_o, ablate_which);
    if (app.got_subcommand("report")) return cmd_report(report_in, report_out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
