#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "smithian/experiment.hpp"
#include "smithian/io.hpp"
#include "smithian/rng.hpp"

using namespace smithian;

namespace {

ExperimentPlan small_plan(std::size_t trials = 4) {
  ExperimentPlan plan;
  plan.trials_per_cell = trials;
  plan.master_seed = 3;
  plan.bootstrap_resamples = 200;
  return plan;
}

std::string records_csv(const std::vector<TrialRecord>& records) {
  std::ostringstream out;
  write_trials_csv(records, out);
  return out.str();
}

}  // namespace

TEST_CASE("seed derivation is stable across builds") {
  REQUIRE(derive_seed(1, {0, 0}) == 7642949275937209199ULL);
  REQUIRE(derive_seed(1, {2}) == 8146081508807897638ULL);
  REQUIRE(derive_seed(42, {4, 99}) == 18397276892036414372ULL);
  REQUIRE(derive_seed(1, {0, 1}) != derive_seed(1, {1, 0}));
}

TEST_CASE("an experiment enumerates cost, condition, trial in order") {
  ExperimentPlan plan = small_plan();
  auto records = run_experiment(plan);
  REQUIRE(records.size() == 5 * 3 * 4);

  std::size_t i = 0;
  for (double cost : plan.costs)
    for (HunterModel cond : plan.conditions)
      for (std::size_t t = 0; t < plan.trials_per_cell; ++t, ++i) {
        REQUIRE(records[i].moving_cost == cost);
        REQUIRE(records[i].condition == hunter_model_name(cond));
        REQUIRE(records[i].steps >= 1);
      }
}

TEST_CASE("conditions share the world: same seed, same wumpus") {
  ExperimentPlan plan = small_plan();
  auto records = run_experiment(plan);
  const std::size_t t_n = plan.trials_per_cell;
  for (std::size_t cost_i = 0; cost_i < plan.costs.size(); ++cost_i) {
    for (std::size_t t = 0; t < t_n; ++t) {
      const TrialRecord& base = records[cost_i * 3 * t_n + 0 * t_n + t];
      const TrialRecord& lit = records[cost_i * 3 * t_n + 1 * t_n + t];
      const TrialRecord& prag = records[cost_i * 3 * t_n + 2 * t_n + t];
      REQUIRE(base.seed == derive_seed(plan.master_seed, {cost_i, t}));
      REQUIRE(base.seed == lit.seed);
      REQUIRE(base.seed == prag.seed);
      REQUIRE(base.wumpus_pos == lit.wumpus_pos);
      REQUIRE(base.wumpus_pos == prag.wumpus_pos);
    }
  }
}

TEST_CASE("experiments are reproducible and parallelism does not change them") {
  ExperimentPlan plan = small_plan();
  std::string first = records_csv(run_experiment(plan));
  std::string second = records_csv(run_experiment(plan));
  std::string threaded = records_csv(run_experiment(plan, 3));
  REQUIRE(first == second);
  REQUIRE(first == threaded);

  ExperimentPlan other = plan;
  other.master_seed = 4;
  REQUIRE(records_csv(run_experiment(other)) != first);
}

TEST_CASE("degenerate plans are rejected or empty") {
  ExperimentPlan none = small_plan(0);
  REQUIRE(run_experiment(none).empty());
  REQUIRE_THROWS_AS(compute_stats({}, none), std::invalid_argument);

  ExperimentPlan no_costs = small_plan();
  no_costs.costs.clear();
  REQUIRE_THROWS_AS(run_experiment(no_costs), std::invalid_argument);
}

TEST_CASE("the same policy serves every condition at a given cost") {
  ExperimentPlan plan = small_plan();
  Policy p1 = solve_for_cost(plan, -5.0);
  Policy p2 = solve_for_cost(plan, -5.0);
  REQUIRE(p1.vectors().size() == p2.vectors().size());
  for (std::size_t i = 0; i < p1.vectors().size(); ++i) {
    REQUIRE(p1.vectors()[i].action == p2.vectors()[i].action);
    REQUIRE(p1.vectors()[i].coeffs == p2.vectors()[i].coeffs);
  }
}

TEST_CASE("summary statistics line up with the raw records") {
  ExperimentPlan plan = small_plan(30);
  auto records = run_experiment(plan);
  StatsReport report = compute_stats(records, plan);

  REQUIRE(report.n_trials == records.size());
  REQUIRE(report.cells.size() == 15);
  REQUIRE(report.per_cost.size() == 5);
  REQUIRE(report.posthoc.size() == 3);

  REQUIRE(report.anova.factor_a.df == 2);
  REQUIRE(report.anova.factor_b.df == 4);
  REQUIRE(report.anova.interaction.df == 8);
  REQUIRE(report.anova.df_error == 3 * 5 * (30 - 1));

  std::size_t k = 0;
  for (double cost : plan.costs) {
    for (HunterModel cond : plan.conditions) {
      const CellStats& cell = report.cells[k++];
      REQUIRE(cell.cost == cost);
      REQUIRE(cell.condition == hunter_model_name(cond));
      REQUIRE(cell.n == 30);

      double mean = 0.0, var = 0.0;
      for (const auto& r : records)
        if (r.moving_cost == cost && r.condition == cell.condition) mean += r.total_reward;
      mean /= 30.0;
      for (const auto& r : records)
        if (r.moving_cost == cost && r.condition == cell.condition)
          var += (r.total_reward - mean) * (r.total_reward - mean);
      var /= 29.0;

      REQUIRE(cell.mean == Catch::Approx(mean).margin(1e-9));
      REQUIRE(cell.ci.low <= cell.mean);
      REQUIRE(cell.ci.high >= cell.mean);
      // The clairvoyant ceiling from the corner is one move plus the shot.
      REQUIRE(cell.upper_bound == Catch::Approx(100.0 + cost).margin(1e-9));
      REQUIRE(cell.mean <= cell.upper_bound + 2.0 * std::sqrt(var / 30.0));
    }
  }

  SECTION("the variance decomposition closes") {
    double grand = 0.0;
    for (const auto& r : records) grand += r.total_reward;
    grand /= double(records.size());
    double ss_total = 0.0;
    for (const auto& r : records)
      ss_total += (r.total_reward - grand) * (r.total_reward - grand);
    double recomposed = report.anova.factor_a.ss + report.anova.factor_b.ss +
                        report.anova.interaction.ss + report.anova.ss_error;
    REQUIRE(recomposed == Catch::Approx(ss_total).epsilon(1e-6));
  }
}

TEST_CASE("bootstrap stream is isolated from the episode stream") {
  ExperimentPlan plan = small_plan();
  auto records = run_experiment(plan);
  StatsReport a = compute_stats(records, plan, 101);
  StatsReport b = compute_stats(records, plan, 101);
  StatsReport c = compute_stats(records, plan, 202);

  REQUIRE(a.cells[0].ci.low == b.cells[0].ci.low);
  REQUIRE(a.cells[0].ci.high == b.cells[0].ci.high);
  // A different stats stream re-draws the intervals but never the data.
  REQUIRE(a.cells[0].mean == c.cells[0].mean);
  REQUIRE(a.anova.factor_a.f == c.anova.factor_a.f);
  REQUIRE(records_csv(records) == records_csv(run_experiment(plan)));
}

TEST_CASE("trial tables survive the CSV round trip byte for byte") {
  ExperimentPlan plan = small_plan();
  auto records = run_experiment(plan);
  std::string text = records_csv(records);
  std::istringstream in(text);
  auto parsed = read_trials_csv(in);
  REQUIRE(parsed.size() == records.size());
  REQUIRE(records_csv(parsed) == text);
}

TEST_CASE("plans survive the JSON round trip") {
  ExperimentPlan plan = small_plan(7);
  plan.signaler.alpha = 3.5;
  plan.solver.belief_points = 48;
  plan.ci_level = 0.9;
  Json j = plan_to_json(plan);
  ExperimentPlan back = plan_from_json(j);
  REQUIRE(plan_to_json(back) == j);
  REQUIRE(back.trials_per_cell == 7);
  REQUIRE(back.signaler.alpha == 3.5);
  REQUIRE(back.solver.belief_points == 48);
  REQUIRE(back.ci_level == 0.9);
}

TEST_CASE("identical reports serialize identically") {
  ExperimentPlan plan = small_plan();
  auto records = run_experiment(plan);
  std::string s1 = stats_to_json(compute_stats(records, plan)).dump(2);
  std::string s2 = stats_to_json(compute_stats(records, plan)).dump(2);
  REQUIRE(s1 == s2);
}

TEST_CASE("plan overrides address nested keys") {
  Json j = plan_to_json(small_plan());
  apply_override(j, "signaler.alpha=7.5");
  apply_override(j, "trials_per_cell=12");
  ExperimentPlan plan = plan_from_json(j);
  REQUIRE(plan.signaler.alpha == 7.5);
  REQUIRE(plan.trials_per_cell == 12);
  REQUIRE_THROWS_AS(apply_override(j, "no_such_key=1"), std::invalid_argument);
  REQUIRE_THROWS_AS(apply_override(j, "missing_equals"), std::invalid_argument);
}
