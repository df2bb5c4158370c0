// Command-line front end: solve policies, run the study, recompute stats,
// trace single episodes, and emit plot-ready data.
//
// Exit codes: 0 success, 1 usage error, 2 runtime failure.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "smithian/episode.hpp"
#include "smithian/experiment.hpp"
#include "smithian/io.hpp"

namespace fs = std::filesystem;
using smithian::Json;

namespace {

struct CommonOpts {
  std::string plan_path = "plans/canonical.json";
  std::string out_dir;
  std::vector<std::string> overrides;
  bool has_seed = false;
  std::uint64_t seed = 0;
  std::size_t jobs = 1;
  bool trace = false;
  bool quiet = false;
  bool verbose = false;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--plan", o.plan_path, "experiment plan JSON")->capture_default_str();
  cmd->add_option("--out", o.out_dir, "output directory (default: $SMITHIAN_OUT_DIR or .)");
  cmd->add_option("--override", o.overrides, "plan override, key=value (repeatable)");
  cmd->add_option("--seed", o.seed, "replace the plan's master seed")
      ->each([&o](const std::string&) { o.has_seed = true; });
  cmd->add_flag("--quiet,-q", o.quiet, "suppress normal output");
  cmd->add_flag("-v,--verbose", o.verbose, "print progress detail");
}

fs::path resolve_out_dir(const CommonOpts& o) {
  std::string dir = o.out_dir;
  if (dir.empty()) {
    const char* env = std::getenv("SMITHIAN_OUT_DIR");
    dir = env && *env ? env : ".";
  }
  fs::create_directories(dir);
  return fs::path(dir);
}

Json load_plan_json(const CommonOpts& o) {
  Json plan_json = Json::parse(smithian::read_text_file(o.plan_path));
  for (const auto& ov : o.overrides) smithian::apply_override(plan_json, ov);
  if (o.has_seed) plan_json["master_seed"] = o.seed;
  return plan_json;
}

void write_manifest(const fs::path& out_dir, const std::string& command, const Json& plan_json,
                    const CommonOpts& o, const Json& outputs) {
  Json manifest;
  manifest["command"] = command;
  manifest["plan_file"] = o.plan_path;
  manifest["overrides"] = o.overrides;
  manifest["jobs"] = o.jobs;
  manifest["plan"] = plan_json;  // fully resolved configuration
  manifest["outputs"] = outputs;
  smithian::write_text_file((out_dir / "manifest.json").string(),
                            manifest.dump(2) + "\n");
}

int cmd_solve(const CommonOpts& o, bool has_cost, double cost_filter) {
  Json plan_json = load_plan_json(o);
  smithian::ExperimentPlan plan = smithian::plan_from_json(plan_json);
  fs::path out_dir = resolve_out_dir(o);

  Json outputs = Json::array();
  for (double cost : plan.costs) {
    if (has_cost && cost != cost_filter) continue;
    smithian::PomdpModel model;
    smithian::Policy policy = smithian::solve_for_cost(plan, cost, &model);
    smithian::Belief b0 = smithian::wumpus_initial_belief();
    Json j = smithian::policy_to_json(policy, model, b0);
    j["moving_cost"] = cost;
    std::string key = smithian::solver_cache_key(plan, cost);
    j["config_key"] = key;
    std::string name = "policy_" + smithian::format_double(cost) + "_" + key + ".json";
    smithian::write_text_file((out_dir / name).string(), j.dump(2) + "\n");
    outputs.push_back(name);
    std::string model_name = "model_" + smithian::format_double(cost) + ".json";
    smithian::write_text_file((out_dir / model_name).string(),
                              smithian::model_to_json(model).dump(2) + "\n");
    outputs.push_back(model_name);
    if (!o.quiet)
      std::cout << "cost " << cost << ": value " << policy.value(b0) << ", first action "
                << smithian::wumpus_action_name(policy.greedy_action(b0)) << ", residual "
                << policy.residual() << ", " << policy.vectors().size() << " vectors\n";
  }
  if (outputs.empty()) {
    std::cerr << "solve: no plan cost matches the requested --cost\n";
    return 1;
  }
  write_manifest(out_dir, "solve", plan_json, o, outputs);
  return 0;
}

int cmd_run(const CommonOpts& o) {
  Json plan_json = load_plan_json(o);
  smithian::ExperimentPlan plan = smithian::plan_from_json(plan_json);
  fs::path out_dir = resolve_out_dir(o);

  if (o.verbose)
    std::cout << "running " << plan.conditions.size() * plan.costs.size() * plan.trials_per_cell
              << " trials (" << o.jobs << " jobs)\n";
  auto records = smithian::run_experiment(plan, o.jobs);
  if (records.empty()) {
    std::cerr << "run: plan produced no trials (trials_per_cell is 0)\n";
    return 1;
  }

  std::ostringstream trials;
  smithian::write_trials_csv(records, trials);
  smithian::write_text_file((out_dir / "trials.csv").string(), trials.str());

  smithian::StatsReport report = smithian::compute_stats(records, plan);
  smithian::write_text_file((out_dir / "stats.json").string(),
                            smithian::stats_to_json(report).dump(2) + "\n");

  std::ostringstream fig;
  smithian::write_figure2_csv(report, fig);
  smithian::write_text_file((out_dir / "figure2.csv").string(), fig.str());

  Json outputs = Json::array({"trials.csv", "stats.json", "figure2.csv"});

  if (o.trace) {
    // Re-run every episode with tracing on; episodes are deterministic given
    // their seeds, so this reproduces the exact runs just recorded.
    std::ostringstream tr;
    tr << "episode,step,stench,svi_point,svi_no_point,signal,belief_before,belief_after\n";
    std::size_t episode = 0;
    for (std::size_t cost_i = 0; cost_i < plan.costs.size(); ++cost_i) {
      smithian::PomdpModel model;
      smithian::Policy policy = smithian::solve_for_cost(plan, plan.costs[cost_i], &model);
      for (std::size_t cond_i = 0; cond_i < plan.conditions.size(); ++cond_i)
        for (std::size_t t = 0; t < plan.trials_per_cell; ++t, ++episode) {
          smithian::EpisodeConfig cfg = smithian::episode_config(plan, plan.costs[cost_i]);
          cfg.seed = smithian::derive_seed(plan.master_seed, {cost_i, t});
          smithian::GuideModel guide{plan.signaler};
          bool baseline = plan.conditions[cond_i] == smithian::HunterModel::BASELINE;
          std::vector<smithian::TraceRow> rows;
          smithian::run_episode(cfg, model, policy, plan.conditions[cond_i],
                                baseline ? nullptr : &guide, &rows);
          std::ostringstream one;
          smithian::write_trace_csv(rows, one);
          std::istringstream lines(one.str());
          std::string line;
          std::getline(lines, line);  // drop the per-episode header
          while (std::getline(lines, line)) tr << episode << ',' << line << "\n";
        }
    }
    smithian::write_text_file((out_dir / "trace.csv").string(), tr.str());
    outputs.push_back("trace.csv");
  }

  write_manifest(out_dir, "run", plan_json, o, outputs);

  if (!o.quiet) {
    const auto& aov = report.anova;
    std::cout << records.size() << " trials -> " << (out_dir / "trials.csv").string() << "\n"
              << "condition effect: F(" << aov.factor_a.df << "," << aov.df_error
              << ") = " << aov.factor_a.f << ", p = " << aov.factor_a.p << "\n"
              << "cost effect:      F(" << aov.factor_b.df << "," << aov.df_error
              << ") = " << aov.factor_b.f << ", p = " << aov.factor_b.p << "\n"
              << "interaction:      F(" << aov.interaction.df << "," << aov.df_error
              << ") = " << aov.interaction.f << ", p = " << aov.interaction.p << "\n";
  }
  return 0;
}

int cmd_stats(const CommonOpts& o, const std::string& in_path) {
  Json plan_json = load_plan_json(o);
  smithian::ExperimentPlan plan = smithian::plan_from_json(plan_json);
  fs::path out_dir = resolve_out_dir(o);

  std::istringstream in(smithian::read_text_file(in_path));
  auto records = smithian::read_trials_csv(in);
  smithian::StatsReport report = smithian::compute_stats(records, plan);
  smithian::write_text_file((out_dir / "stats.json").string(),
                            smithian::stats_to_json(report).dump(2) + "\n");
  write_manifest(out_dir, "stats", plan_json, o, Json::array({"stats.json"}));
  if (!o.quiet)
    std::cout << records.size() << " trials -> " << (out_dir / "stats.json").string() << "\n";
  return 0;
}

int cmd_trace(const CommonOpts& o, double cost, const std::string& condition) {
  // For trace, --seed seeds the episode itself; the default is the first
  // canonical trial of the requested cost.
  CommonOpts plan_opts = o;
  plan_opts.has_seed = false;
  Json plan_json = load_plan_json(plan_opts);
  smithian::ExperimentPlan plan = smithian::plan_from_json(plan_json);
  fs::path out_dir = resolve_out_dir(o);

  smithian::HunterModel hunter = smithian::hunter_model_from_name(condition);
  smithian::EpisodeConfig cfg = smithian::episode_config(plan, cost);
  std::size_t cost_i = 0;
  while (cost_i < plan.costs.size() && plan.costs[cost_i] != cost) ++cost_i;
  cfg.seed = o.has_seed ? o.seed
                        : smithian::derive_seed(plan.master_seed,
                                                {cost_i < plan.costs.size() ? cost_i : 0, 0});

  smithian::PomdpModel model = smithian::build_model(cfg);
  smithian::Policy policy = smithian::pbvi_solve(model, plan.solver, smithian::wumpus_initial_belief());
  smithian::GuideModel guide{plan.signaler};
  std::vector<smithian::TraceRow> rows;
  auto rec = smithian::run_episode(cfg, model, policy, hunter,
                                   hunter == smithian::HunterModel::BASELINE ? nullptr : &guide,
                                   &rows);

  std::ostringstream tr;
  smithian::write_trace_csv(rows, tr);
  smithian::write_text_file((out_dir / "trace.csv").string(), tr.str());
  write_manifest(out_dir, "trace", plan_json, o, Json::array({"trace.csv"}));
  if (!o.quiet)
    std::cout << rec.condition << " cost " << rec.moving_cost << " seed " << rec.seed << ": "
              << rec.steps << " steps, reward " << rec.total_reward
              << (rec.cap_hit ? " (cap hit)" : rec.hit ? " (hit)" : " (miss)") << "\n";
  return 0;
}

int cmd_plot_data(const CommonOpts& o, const std::string& in_path) {
  Json plan_json = load_plan_json(o);
  smithian::ExperimentPlan plan = smithian::plan_from_json(plan_json);
  fs::path out_dir = resolve_out_dir(o);

  std::istringstream in(smithian::read_text_file(in_path));
  auto records = smithian::read_trials_csv(in);
  smithian::StatsReport report = smithian::compute_stats(records, plan);
  std::ostringstream fig;
  smithian::write_figure2_csv(report, fig);
  smithian::write_text_file((out_dir / "figure2.csv").string(), fig.str());
  write_manifest(out_dir, "plot-data", plan_json, o, Json::array({"figure2.csv"}));
  if (!o.quiet) std::cout << "figure data -> " << (out_dir / "figure2.csv").string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Smithian-signaling Wumpus study"};
  app.require_subcommand(1);

  CommonOpts solve_o, run_o, stats_o, trace_o, plot_o;

  auto* solve = app.add_subcommand("solve", "solve and dump the policy per moving cost");
  add_common(solve, solve_o);
  double solve_cost = 0.0;
  auto* solve_cost_opt = solve->add_option("--cost", solve_cost, "solve only this moving cost");

  auto* run = app.add_subcommand("run", "run the experiment and write trials, stats, figure data");
  add_common(run, run_o);
  run->add_option("--jobs", run_o.jobs, "worker threads")->capture_default_str();
  run->add_flag("--trace", run_o.trace, "also write a per-step trace of every episode");

  auto* stats = app.add_subcommand("stats", "recompute statistics from an existing trials CSV");
  add_common(stats, stats_o);
  std::string stats_in = "trials.csv";
  stats->add_option("--in", stats_in, "trials CSV to read")->capture_default_str();

  auto* trace = app.add_subcommand("trace", "trace one episode step by step");
  add_common(trace, trace_o);
  double trace_cost = -5.0;
  std::string trace_condition = "PRAGMATIC";
  trace->add_option("--cost", trace_cost, "moving cost")->capture_default_str();
  trace->add_option("--condition", trace_condition, "hunter model")->capture_default_str();

  auto* plot = app.add_subcommand("plot-data", "emit figure-ready cell summaries from trials");
  add_common(plot, plot_o);
  std::string plot_in = "trials.csv";
  plot->add_option("--in", plot_in, "trials CSV to read")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (solve->parsed()) return cmd_solve(solve_o, !solve_cost_opt->empty(), solve_cost);
    if (run->parsed()) return cmd_run(run_o);
    if (stats->parsed()) return cmd_stats(stats_o, stats_in);
    if (trace->parsed()) return cmd_trace(trace_o, trace_cost, trace_condition);
    if (plot->parsed()) return cmd_plot_data(plot_o, plot_in);
  } catch (const std::invalid_argument& e) {
    // bad overrides, unknown conditions, malformed plans: usage problems
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}
