#pragma once

// Serialization: trial/trace CSV, plan and stats JSON, policy dumps. Doubles
// go through std::to_chars (shortest round-trip form) so output files are
// byte-identical across runs and machines.

#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "episode.hpp"
#include "experiment.hpp"
#include "pbvi.hpp"
#include "wumpus.hpp"

namespace smithian {

using Json = nlohmann::ordered_json;

inline std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  if (res.ec != std::errc{}) throw std::runtime_error("format_double: conversion failed");
  return std::string(buf, res.ptr);
}

inline double parse_double(const std::string& s) {
  try {
    std::size_t used = 0;
    double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw std::invalid_argument("parse_double: bad number '" + s + "'");
  }
}

inline std::string join_belief(const Belief& b) {
  std::string out;
  for (std::size_t i = 0; i < b.size(); ++i) {
    if (i) out.push_back(';');
    out += format_double(b[i]);
  }
  return out;
}

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  fields.push_back(cur);
  return fields;
}

}  // namespace detail

inline constexpr const char* kTrialsHeader =
    "condition,moving_cost,seed,steps,shot_action,shot_tile,wumpus_pos,hit,total_reward,cap_hit,"
    "n_points,n_stench";

inline void write_trials_csv(const std::vector<TrialRecord>& records, std::ostream& out) {
  out << kTrialsHeader << "\n";
  for (const auto& r : records) {
    out << r.condition << ',' << format_double(r.moving_cost) << ',' << r.seed << ',' << r.steps
        << ',' << r.shot_action << ',' << r.shot_tile << ',' << r.wumpus_pos << ','
        << (r.hit ? 1 : 0) << ',' << format_double(r.total_reward) << ',' << (r.cap_hit ? 1 : 0)
        << ',' << r.n_points << ',' << r.n_stench << "\n";
  }
}

inline std::vector<TrialRecord> read_trials_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("trials csv: empty file");
  if (detail::split_csv_line(line) != detail::split_csv_line(kTrialsHeader))
    throw std::runtime_error("trials csv: unexpected header");
  std::vector<TrialRecord> records;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto f = detail::split_csv_line(line);
    if (f.size() != 12) throw std::runtime_error("trials csv: bad row '" + line + "'");
    TrialRecord r;
    r.condition = f[0];
    r.moving_cost = parse_double(f[1]);
    r.seed = std::stoull(f[2]);
    r.steps = std::stoull(f[3]);
    r.shot_action = f[4];
    r.shot_tile = f[5];
    r.wumpus_pos = f[6];
    r.hit = f[7] == "1";
    r.total_reward = parse_double(f[8]);
    r.cap_hit = f[9] == "1";
    r.n_points = std::stoull(f[10]);
    r.n_stench = std::stoull(f[11]);
    records.push_back(std::move(r));
  }
  return records;
}

inline void write_trace_csv(const std::vector<TraceRow>& rows, std::ostream& out) {
  out << "step,stench,svi_point,svi_no_point,signal,belief_before,belief_after\n";
  for (const auto& row : rows) {
    out << row.step << ',' << (row.stench ? 1 : 0) << ',';
    if (row.signal_event)
      out << format_double(row.svi_point) << ',' << format_double(row.svi_no_point) << ','
          << (row.signal == POINT ? "POINT" : "NO_POINT");
    else
      out << ",,";
    out << ',' << join_belief(row.belief_before) << ',' << join_belief(row.belief_after) << "\n";
  }
}

inline Json plan_to_json(const ExperimentPlan& plan) {
  Json j;
  j["master_seed"] = plan.master_seed;
  Json conds = Json::array();
  for (auto c : plan.conditions) conds.push_back(hunter_model_name(c));
  j["conditions"] = conds;
  j["costs"] = plan.costs;
  j["trials_per_cell"] = plan.trials_per_cell;
  j["discount"] = plan.discount;
  j["max_steps"] = plan.max_steps;
  j["ray_shooting"] = plan.ray_shooting;
  j["signaler"] = Json{{"alpha", plan.signaler.alpha},
                       {"signal_cost_point", plan.signaler.signal_cost[POINT]},
                       {"signal_cost_no_point", plan.signaler.signal_cost[NO_POINT]},
                       {"receiver_temperature", plan.signaler.receiver_temperature}};
  j["solver"] = Json{{"belief_points", plan.solver.belief_points},
                     {"expansion_rounds", plan.solver.expansion_rounds},
                     {"backup_sweeps", plan.solver.backup_sweeps},
                     {"tolerance", plan.solver.tolerance},
                     {"explore_epsilon", plan.solver.explore_epsilon},
                     {"simulation_depth", plan.solver.simulation_depth},
                     {"seed", plan.solver.seed}};
  j["bootstrap_resamples"] = plan.bootstrap_resamples;
  j["ci_level"] = plan.ci_level;
  return j;
}

inline ExperimentPlan plan_from_json(const Json& j) {
  ExperimentPlan plan;
  plan.master_seed = j.at("master_seed").get<std::uint64_t>();
  plan.conditions.clear();
  for (const auto& name : j.at("conditions"))
    plan.conditions.push_back(hunter_model_from_name(name.get<std::string>()));
  plan.costs = j.at("costs").get<std::vector<double>>();
  plan.trials_per_cell = j.at("trials_per_cell").get<std::size_t>();
  plan.discount = j.at("discount").get<double>();
  plan.max_steps = j.at("max_steps").get<std::size_t>();
  plan.ray_shooting = j.at("ray_shooting").get<bool>();
  const auto& sig = j.at("signaler");
  plan.signaler.alpha = sig.at("alpha").get<double>();
  plan.signaler.signal_cost[POINT] = sig.at("signal_cost_point").get<double>();
  plan.signaler.signal_cost[NO_POINT] = sig.at("signal_cost_no_point").get<double>();
  plan.signaler.receiver_temperature = sig.at("receiver_temperature").get<double>();
  const auto& sol = j.at("solver");
  plan.solver.belief_points = sol.at("belief_points").get<std::size_t>();
  plan.solver.expansion_rounds = sol.at("expansion_rounds").get<std::size_t>();
  plan.solver.backup_sweeps = sol.at("backup_sweeps").get<std::size_t>();
  plan.solver.tolerance = sol.at("tolerance").get<double>();
  plan.solver.explore_epsilon = sol.at("explore_epsilon").get<double>();
  plan.solver.simulation_depth = sol.at("simulation_depth").get<std::size_t>();
  plan.solver.seed = sol.at("seed").get<std::uint64_t>();
  plan.bootstrap_resamples = j.at("bootstrap_resamples").get<std::size_t>();
  plan.ci_level = j.at("ci_level").get<double>();
  return plan;
}

// Dotted-path overrides against the plan JSON ("signaler.alpha=1"). Unknown
// keys are rejected with the full list of valid ones.
inline std::vector<std::string> plan_override_keys(const Json& j, const std::string& prefix = "") {
  std::vector<std::string> keys;
  for (const auto& [key, value] : j.items()) {
    std::string path = prefix.empty() ? key : prefix + "." + key;
    if (value.is_object()) {
      auto sub = plan_override_keys(value, path);
      keys.insert(keys.end(), sub.begin(), sub.end());
    } else {
      keys.push_back(path);
    }
  }
  return keys;
}

inline void apply_override(Json& plan_json, const std::string& assignment) {
  auto eq = assignment.find('=');
  if (eq == std::string::npos)
    throw std::invalid_argument("override '" + assignment + "' is not key=value");
  std::string key = assignment.substr(0, eq);
  std::string value = assignment.substr(eq + 1);

  Json* node = &plan_json;
  std::size_t start = 0;
  std::string walked;
  while (true) {
    std::size_t dot = key.find('.', start);
    std::string part = key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    walked = walked.empty() ? part : walked + "." + part;
    if (!node->is_object() || !node->contains(part)) {
      std::string valid;
      for (const auto& k : plan_override_keys(plan_json)) valid += "\n  " + k;
      throw std::invalid_argument("unknown override key '" + key + "'; valid keys:" + valid);
    }
    node = &(*node)[part];
    if (dot == std::string::npos) break;
    start = dot + 1;
  }
  if (node->is_object()) {
    std::string valid;
    for (const auto& k : plan_override_keys(plan_json)) valid += "\n  " + k;
    throw std::invalid_argument("override key '" + key + "' names a group; valid keys:" + valid);
  }

  Json parsed = Json::parse(value, nullptr, false);
  if (parsed.is_discarded()) parsed = value;  // treat unparseable values as strings
  *node = parsed;
}

inline Json anova_to_json(const TwoWayAnova& aov) {
  auto effect = [](const EffectTest& e) {
    return Json{{"ss", e.ss}, {"df", e.df}, {"f", e.f}, {"p", e.p}};
  };
  return Json{{"condition", effect(aov.factor_a)},
              {"cost", effect(aov.factor_b)},
              {"interaction", effect(aov.interaction)},
              {"error", Json{{"ss", aov.ss_error}, {"df", aov.df_error}}}};
}

inline Json stats_to_json(const StatsReport& report) {
  Json j;
  j["n_trials"] = report.n_trials;
  j["anova"] = anova_to_json(report.anova);
  Json posthoc = Json::array();
  for (const auto& pair : report.posthoc)
    posthoc.push_back(Json{{"pair", Json::array({pair.condition_a, pair.condition_b})},
                           {"f", pair.test.f},
                           {"df1", pair.test.df1},
                           {"df2", pair.test.df2},
                           {"p_raw", pair.test.p_raw},
                           {"p_adjusted", pair.test.p_adjusted}});
  j["posthoc"] = posthoc;
  Json per_cost = Json::array();
  for (const auto& pc : report.per_cost)
    per_cost.push_back(Json{{"cost", pc.cost},
                            {"f", pc.anova.f},
                            {"df1", pc.anova.df1},
                            {"df2", pc.anova.df2},
                            {"p", pc.anova.p}});
  j["per_cost"] = per_cost;
  Json cells = Json::array();
  for (const auto& c : report.cells)
    cells.push_back(Json{{"condition", c.condition},
                         {"cost", c.cost},
                         {"n", c.n},
                         {"mean", c.mean},
                         {"ci_low", c.ci.low},
                         {"ci_high", c.ci.high},
                         {"upper_bound", c.upper_bound}});
  j["cells"] = cells;
  return j;
}

inline void write_figure2_csv(const StatsReport& report, std::ostream& out) {
  out << "cost,condition,mean_reward,ci_low,ci_high,upper_bound\n";
  for (const auto& c : report.cells)
    out << format_double(c.cost) << ',' << c.condition << ',' << format_double(c.mean) << ','
        << format_double(c.ci.low) << ',' << format_double(c.ci.high) << ','
        << format_double(c.upper_bound) << "\n";
}

inline Json model_to_json(const PomdpModel& m) {
  return Json{{"n_states", m.n_states},
              {"n_actions", m.n_actions},
              {"n_observations", m.n_observations},
              {"discount", m.discount},
              {"transition", m.transition},
              {"observation", m.observation},
              {"reward", m.reward}};
}

// Key for policy files: every input the solver's output depends on.
inline std::string solver_cache_key(const ExperimentPlan& plan, double cost) {
  std::string text = format_double(cost) + "|" + format_double(plan.discount) + "|" +
                     (plan.ray_shooting ? "ray" : "adjacent") + "|" +
                     std::to_string(plan.solver.belief_points) + "|" +
                     std::to_string(plan.solver.expansion_rounds) + "|" +
                     std::to_string(plan.solver.backup_sweeps) + "|" +
                     format_double(plan.solver.tolerance) + "|" +
                     format_double(plan.solver.explore_epsilon) + "|" +
                     std::to_string(plan.solver.simulation_depth) + "|" +
                     std::to_string(plan.solver.seed);
  std::uint64_t h = 1469598103934665603ULL;  // FNV-1a
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

inline Json policy_to_json(const Policy& policy, const PomdpModel& model, const Belief& initial) {
  Json j;
  j["discount"] = model.discount;
  j["residual"] = policy.residual();
  j["initial_value"] = policy.value(initial);
  j["initial_action"] = wumpus_action_name(policy.greedy_action(initial));
  Json vecs = Json::array();
  for (const auto& av : policy.vectors())
    vecs.push_back(Json{{"action", wumpus_action_name(av.action)}, {"coeffs", av.coeffs}});
  j["alpha_vectors"] = vecs;
  return j;
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << content;
  if (!out) throw std::runtime_error("write failed for " + path);
}

}  // namespace smithian
