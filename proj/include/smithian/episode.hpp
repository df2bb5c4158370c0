#pragma once

// Episode engine: interleaves greedy hunter actions, stochastic stench
// sampling, belief updates, and (when a guide is present) signal generation
// and interpretation. The environment and the guide draw from separate RNG
// streams so that adding a guide never perturbs the world.

#include <cctype>
#include <cstdint>
#include <string>
#include <vector>

#include "pbvi.hpp"
#include "pomdp.hpp"
#include "rng.hpp"
#include "signaling.hpp"
#include "wumpus.hpp"

namespace smithian {

enum class HunterModel {
  BASELINE,        // ignores signals entirely
  LITERAL_DOUBLE,  // POINT counts as a second, independent stench sample
  PRAGMATIC,       // inverts the signaler; updates on POINT and NO_POINT alike
};

inline const char* hunter_model_name(HunterModel h) {
  switch (h) {
    case HunterModel::BASELINE: return "BASELINE";
    case HunterModel::LITERAL_DOUBLE: return "LITERAL_DOUBLE";
    case HunterModel::PRAGMATIC: return "PRAGMATIC";
  }
  return "?";
}

inline HunterModel hunter_model_from_name(const std::string& name) {
  std::string up = name;
  for (auto& c : up) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  if (up == "BASELINE") return HunterModel::BASELINE;
  if (up == "LITERAL_DOUBLE") return HunterModel::LITERAL_DOUBLE;
  if (up == "PRAGMATIC") return HunterModel::PRAGMATIC;
  throw std::invalid_argument("unknown hunter model: " + name);
}

struct GuideModel {
  SignalerConfig signaler;
};

struct TrialRecord {
  std::string condition;
  double moving_cost = 0.0;
  std::uint64_t seed = 0;
  std::size_t steps = 0;
  std::string shot_action;  // empty if the episode hit the step cap
  std::string shot_tile;
  std::string wumpus_pos;
  bool hit = false;
  double total_reward = 0.0;  // undiscounted episode sum
  bool cap_hit = false;
  std::size_t n_points = 0;  // POINT signals emitted by the guide
  std::size_t n_stench = 0;  // stench observations by the hunter
};

struct TraceRow {
  std::size_t step = 0;
  bool stench = false;
  bool signal_event = false;  // guide consulted this step
  double svi_point = 0.0;
  double svi_no_point = 0.0;
  int signal = -1;  // POINT/NO_POINT index, -1 when no signal event
  Belief belief_before;  // receiver belief after the observation update
  Belief belief_after;   // after signal interpretation (equal when none)
};

inline TrialRecord run_episode(const EpisodeConfig& cfg, const PomdpModel& model,
                               const Policy& policy, HunterModel hunter, const GuideModel* guide,
                               std::vector<TraceRow>* trace = nullptr) {
  Rng env_rng(cfg.seed);
  Rng guide_rng(derive_seed(cfg.seed, {1}));

  std::size_t wumpus = env_rng.next_below(3);
  std::size_t hunter_tile = 0;
  Belief belief = wumpus_initial_belief();

  TrialRecord rec;
  rec.condition = hunter_model_name(hunter);
  rec.moving_cost = cfg.moving_cost;
  rec.seed = cfg.seed;
  rec.wumpus_pos = tile_name(kWumpusTiles[wumpus]);

  while (rec.steps < cfg.max_steps) {
    std::size_t a = policy.greedy_action(belief);
    ++rec.steps;

    if (!is_move(a)) {
      bool hit = shot_hits(kHunterTiles[hunter_tile], a, kWumpusTiles[wumpus], cfg.ray_shooting);
      rec.total_reward += hit ? cfg.hit_reward : cfg.miss_reward;
      rec.hit = hit;
      rec.shot_action = a == SHOOT_UP ? "SHOOT_UP" : "SHOOT_RIGHT";
      rec.shot_tile = tile_name(shot_target(kHunterTiles[hunter_tile], a));
      if (trace) {
        TraceRow row;
        row.step = rec.steps;
        row.belief_before = belief;
        row.belief_after = belief;
        trace->push_back(std::move(row));
      }
      return rec;
    }

    Tile dest = move_destination(kHunterTiles[hunter_tile], a);
    if (!traversable(dest)) dest = Tile{0, 0};
    hunter_tile = 0;
    while (kHunterTiles[hunter_tile] != dest) ++hunter_tile;
    rec.total_reward += cfg.moving_cost;

    std::size_t true_state = wumpus_state(hunter_tile, wumpus);
    double p_stench = adjacency(kHunterTiles[hunter_tile], kWumpusTiles[wumpus]) ? kStenchNear
                                                                                 : kStenchFar;
    std::size_t obs = env_rng.next_double() < p_stench ? STENCH : NOTHING;
    belief = belief_update(model, belief, a, obs);

    TraceRow row;
    row.step = rec.steps;
    row.stench = obs == STENCH;
    row.belief_before = belief;

    if (obs == STENCH) {
      ++rec.n_stench;
      if (guide != nullptr) {
        SignalingContext ctx;
        ctx.model = &model;
        ctx.receiver_policy = &policy;
        ctx.signaler_belief.assign(model.n_states, 0.0);
        ctx.signaler_belief[true_state] = 1.0;
        ctx.receiver_belief = belief;
        ctx.last_action = a;
        ctx.last_observation = obs;

        GuideStep step = guide_step(ctx, guide->signaler, guide_rng);
        if (step.signal == POINT) ++rec.n_points;
        row.signal_event = true;
        row.svi_point = step.svi_point;
        row.svi_no_point = step.svi_no_point;
        row.signal = static_cast<int>(step.signal);

        if (hunter == HunterModel::LITERAL_DOUBLE && step.signal == POINT) {
          belief = literal_interpret(model, belief, POINT, obs, a);
        } else if (hunter == HunterModel::PRAGMATIC) {
          belief = pragmatic_interpret(belief, step.signal, [&](std::size_t s) {
            return hypothetical_signaler_distribution(ctx, guide->signaler, s);
          });
        }
      }
    }

    row.belief_after = belief;
    if (trace) trace->push_back(std::move(row));
  }

  rec.cap_hit = true;
  return rec;
}

}  // namespace smithian
