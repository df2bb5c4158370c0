#pragma once

// The full study: 3 hunter conditions x 5 moving costs x N trials, plus the
// statistics reported on it. Trial seeds are common random numbers: they
// derive from (master seed, cost index, trial index) only, so the three
// conditions face identical Wumpus draws and stench noise and differ purely
// in how they use the guide.

#include <cstdint>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "episode.hpp"
#include "fully_observable.hpp"
#include "pbvi.hpp"
#include "pomdp.hpp"
#include "rng.hpp"
#include "stats.hpp"
#include "wumpus.hpp"

namespace smithian {

struct ExperimentPlan {
  std::vector<HunterModel> conditions{HunterModel::BASELINE, HunterModel::LITERAL_DOUBLE,
                                      HunterModel::PRAGMATIC};
  std::vector<double> costs{-1.0, -3.0, -5.0, -7.0, -9.0};
  std::size_t trials_per_cell = 100;
  std::uint64_t master_seed = 1;
  double discount = 0.95;
  std::size_t max_steps = 20;
  bool ray_shooting = false;
  SignalerConfig signaler;
  PbviConfig solver;  // solver seed is fixed, not derived: one policy per cost
  std::size_t bootstrap_resamples = 10000;
  double ci_level = 0.95;
};

inline EpisodeConfig episode_config(const ExperimentPlan& plan, double cost) {
  EpisodeConfig cfg;
  cfg.moving_cost = cost;
  cfg.max_steps = plan.max_steps;
  cfg.discount = plan.discount;
  cfg.ray_shooting = plan.ray_shooting;
  return cfg;
}

inline Policy solve_for_cost(const ExperimentPlan& plan, double cost, PomdpModel* model_out = nullptr) {
  PomdpModel m = build_model(episode_config(plan, cost));
  Policy p = pbvi_solve(m, plan.solver, wumpus_initial_belief());
  if (model_out) *model_out = std::move(m);
  return p;
}

inline std::vector<TrialRecord> run_experiment(const ExperimentPlan& plan, std::size_t jobs = 1) {
  if (plan.conditions.empty() || plan.costs.empty())
    throw std::invalid_argument("run_experiment: empty plan");
  if (plan.trials_per_cell == 0) return {};
  if (jobs == 0) jobs = 1;

  std::vector<PomdpModel> models(plan.costs.size());
  std::vector<Policy> policies;
  policies.reserve(plan.costs.size());
  for (std::size_t ci = 0; ci < plan.costs.size(); ++ci)
    policies.push_back(solve_for_cost(plan, plan.costs[ci], &models[ci]));

  struct Task {
    std::size_t cost_i, cond_i, trial, slot;
  };
  std::vector<Task> tasks;
  tasks.reserve(plan.costs.size() * plan.conditions.size() * plan.trials_per_cell);
  std::size_t slot = 0;
  for (std::size_t cost_i = 0; cost_i < plan.costs.size(); ++cost_i)
    for (std::size_t cond_i = 0; cond_i < plan.conditions.size(); ++cond_i)
      for (std::size_t t = 0; t < plan.trials_per_cell; ++t)
        tasks.push_back(Task{cost_i, cond_i, t, slot++});

  std::vector<TrialRecord> records(tasks.size());
  std::vector<std::string> failures(jobs);
  auto worker = [&](std::size_t offset, std::size_t stride) {
    for (std::size_t i = offset; i < tasks.size(); i += stride) {
      const Task& task = tasks[i];
      EpisodeConfig cfg = episode_config(plan, plan.costs[task.cost_i]);
      cfg.seed = derive_seed(plan.master_seed, {task.cost_i, task.trial});
      HunterModel hunter = plan.conditions[task.cond_i];
      GuideModel guide{plan.signaler};
      const GuideModel* guide_ptr = hunter == HunterModel::BASELINE ? nullptr : &guide;
      try {
        records[task.slot] =
            run_episode(cfg, models[task.cost_i], policies[task.cost_i], hunter, guide_ptr);
      } catch (const std::exception& e) {
        failures[offset] = "cell (" + std::string(hunter_model_name(hunter)) + ", cost " +
                           std::to_string(plan.costs[task.cost_i]) + ", trial " +
                           std::to_string(task.trial) + ", seed " + std::to_string(cfg.seed) +
                           "): " + e.what();
        return;
      }
    }
  };

  if (jobs == 1) {
    worker(0, 1);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(jobs);
    for (std::size_t j = 0; j < jobs; ++j) pool.emplace_back(worker, j, jobs);
    for (auto& th : pool) th.join();
  }
  for (const auto& f : failures)
    if (!f.empty()) throw std::runtime_error("run_experiment: " + f);
  return records;
}

struct CellStats {
  std::string condition;
  double cost = 0.0;
  double mean = 0.0;
  Interval ci;
  double upper_bound = 0.0;  // full-observability ceiling 100 + cost
  std::size_t n = 0;
};

struct PosthocPair {
  std::string condition_a;
  std::string condition_b;
  PosthocResult test;
};

struct PerCostTest {
  double cost = 0.0;
  OneWayAnova anova;  // conditions compared within this cost alone
};

struct StatsReport {
  std::vector<CellStats> cells;  // ordered (cost, condition) per the plan
  TwoWayAnova anova;             // factor A = condition, factor B = cost
  std::vector<PosthocPair> posthoc;
  std::vector<PerCostTest> per_cost;
  std::size_t n_trials = 0;
};

// The clairvoyant ceiling shown alongside the cell means: the undiscounted
// optimal value with the Wumpus visible, averaged over its three positions.
inline double fully_observable_bound(const ExperimentPlan& plan, double cost) {
  FullyObservableSolution fo = solve_fully_observable(build_model(episode_config(plan, cost)));
  double total = 0.0;
  for (std::size_t w = 0; w < 3; ++w) total += fo.values[wumpus_state(0, w)];
  return total / 3.0;
}

inline StatsReport compute_stats(const std::vector<TrialRecord>& records,
                                 const ExperimentPlan& plan, std::uint64_t stats_seed) {
  if (records.empty()) throw std::invalid_argument("compute_stats: no trials");

  auto cond_index = [&](const std::string& name) {
    for (std::size_t i = 0; i < plan.conditions.size(); ++i)
      if (name == hunter_model_name(plan.conditions[i])) return i;
    throw std::invalid_argument("compute_stats: unknown condition " + name);
  };
  auto cost_index = [&](double cost) {
    for (std::size_t i = 0; i < plan.costs.size(); ++i)
      if (cost == plan.costs[i]) return i;
    throw std::invalid_argument("compute_stats: unknown cost " + std::to_string(cost));
  };

  std::vector<std::vector<std::vector<double>>> cells(
      plan.conditions.size(), std::vector<std::vector<double>>(plan.costs.size()));
  for (const auto& r : records)
    cells[cond_index(r.condition)][cost_index(r.moving_cost)].push_back(r.total_reward);

  StatsReport report;
  report.n_trials = records.size();
  report.anova = two_way_anova(cells);

  Rng boot_rng(stats_seed);
  for (std::size_t cost_i = 0; cost_i < plan.costs.size(); ++cost_i) {
    double bound = fully_observable_bound(plan, plan.costs[cost_i]);
    for (std::size_t cond_i = 0; cond_i < plan.conditions.size(); ++cond_i) {
      const auto& xs = cells[cond_i][cost_i];
      CellStats cs;
      cs.condition = hunter_model_name(plan.conditions[cond_i]);
      cs.cost = plan.costs[cost_i];
      cs.mean = detail::mean_of(xs);
      cs.ci = bootstrap_ci(xs, plan.bootstrap_resamples, plan.ci_level, boot_rng);
      cs.upper_bound = bound;
      cs.n = xs.size();
      report.cells.push_back(std::move(cs));
    }
  }

  std::size_t n_pairs = plan.conditions.size() * (plan.conditions.size() - 1) / 2;
  for (std::size_t i = 0; i < plan.conditions.size(); ++i)
    for (std::size_t j = i + 1; j < plan.conditions.size(); ++j) {
      std::vector<double> pool_i, pool_j;
      for (std::size_t cost_i = 0; cost_i < plan.costs.size(); ++cost_i) {
        pool_i.insert(pool_i.end(), cells[i][cost_i].begin(), cells[i][cost_i].end());
        pool_j.insert(pool_j.end(), cells[j][cost_i].begin(), cells[j][cost_i].end());
      }
      PosthocPair pair;
      pair.condition_a = hunter_model_name(plan.conditions[i]);
      pair.condition_b = hunter_model_name(plan.conditions[j]);
      pair.test = bonferroni_posthoc(pool_i, pool_j, n_pairs);
      report.posthoc.push_back(std::move(pair));
    }

  for (std::size_t cost_i = 0; cost_i < plan.costs.size(); ++cost_i) {
    std::vector<std::vector<double>> groups;
    for (std::size_t cond_i = 0; cond_i < plan.conditions.size(); ++cond_i)
      groups.push_back(cells[cond_i][cost_i]);
    report.per_cost.push_back(PerCostTest{plan.costs[cost_i], one_way_anova(groups)});
  }
  return report;
}

// Default stats stream: derived from the master seed, independent of the
// environment and guide streams (which use per-trial derivations).
inline StatsReport compute_stats(const std::vector<TrialRecord>& records,
                                 const ExperimentPlan& plan) {
  return compute_stats(records, plan, derive_seed(plan.master_seed, {2}));
}

}  // namespace smithian
