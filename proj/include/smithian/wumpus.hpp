#pragma once

// The guided Wumpus hunting game as a concrete PomdpModel. A 3x3 corner map:
// the hunter can stand on (0,0), (0,1), (1,0); the Wumpus hides on one of
// (0,2), (1,1), (2,0). Moves go up / right one tile; any illegal destination
// (off those three hunter tiles, including Wumpus candidates) drops the
// hunter back to (0,0), cost still paid. Shots target the adjacent tile in
// the chosen direction, end the game, and pay +100 / -100. Stench is sampled
// at the hunter's tile: 0.85 when 4-adjacent to the Wumpus, 0.15 otherwise.

#include <array>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include "pomdp.hpp"

namespace smithian {

struct Tile {
  int x = 0;
  int y = 0;
  friend bool operator==(const Tile& a, const Tile& b) { return a.x == b.x && a.y == b.y; }
  friend bool operator!=(const Tile& a, const Tile& b) { return !(a == b); }
};

inline std::string tile_name(const Tile& t) {
  return std::to_string(t.x) + "_" + std::to_string(t.y);
}

enum WumpusAction : std::size_t {
  MOVE_VERTICAL = 0,
  MOVE_HORIZONTAL = 1,
  SHOOT_UP = 2,
  SHOOT_RIGHT = 3,
};

enum WumpusObservation : std::size_t {
  STENCH = 0,
  NOTHING = 1,
};

inline const char* wumpus_action_name(std::size_t a) {
  switch (a) {
    case MOVE_VERTICAL: return "MOVE_VERTICAL";
    case MOVE_HORIZONTAL: return "MOVE_HORIZONTAL";
    case SHOOT_UP: return "SHOOT_UP";
    case SHOOT_RIGHT: return "SHOOT_RIGHT";
  }
  return "?";
}

inline constexpr std::array<Tile, 3> kHunterTiles{{{0, 0}, {0, 1}, {1, 0}}};
inline constexpr std::array<Tile, 3> kWumpusTiles{{{0, 2}, {1, 1}, {2, 0}}};
inline constexpr std::size_t kTerminalState = 9;
inline constexpr double kStenchNear = 0.85;
inline constexpr double kStenchFar = 0.15;

inline bool adjacency(const Tile& a, const Tile& b) {
  return std::abs(a.x - b.x) + std::abs(a.y - b.y) == 1;
}

inline std::size_t wumpus_state(std::size_t hunter_idx, std::size_t wumpus_idx) {
  return hunter_idx * 3 + wumpus_idx;
}

inline bool is_move(std::size_t a) { return a == MOVE_VERTICAL || a == MOVE_HORIZONTAL; }

inline Tile move_destination(const Tile& from, std::size_t action) {
  if (action == MOVE_VERTICAL) return Tile{from.x, from.y + 1};
  if (action == MOVE_HORIZONTAL) return Tile{from.x + 1, from.y};
  throw std::invalid_argument("move_destination: not a move action");
}

inline Tile shot_target(const Tile& from, std::size_t action) {
  if (action == SHOOT_UP) return Tile{from.x, from.y + 1};
  if (action == SHOOT_RIGHT) return Tile{from.x + 1, from.y};
  throw std::invalid_argument("shot_target: not a shoot action");
}

inline bool traversable(const Tile& t) {
  for (const auto& h : kHunterTiles)
    if (h == t) return true;
  return false;
}

// Ray semantics (non-canonical, kept behind EpisodeConfig::ray_shooting):
// the arrow flies along the direction and hits the Wumpus anywhere on the ray.
inline bool shot_hits(const Tile& hunter, std::size_t action, const Tile& wumpus,
                      bool ray_shooting) {
  if (!ray_shooting) return shot_target(hunter, action) == wumpus;
  if (action == SHOOT_UP) return wumpus.x == hunter.x && wumpus.y > hunter.y;
  if (action == SHOOT_RIGHT) return wumpus.y == hunter.y && wumpus.x > hunter.x;
  throw std::invalid_argument("shot_hits: not a shoot action");
}

struct EpisodeConfig {
  double moving_cost = -1.0;
  double hit_reward = 100.0;
  double miss_reward = -100.0;
  std::size_t max_steps = 20;
  std::uint64_t seed = 0;
  double discount = 0.95;
  bool ray_shooting = false;
};

inline PomdpModel build_model(const EpisodeConfig& cfg) {
  if (cfg.moving_cost >= 0.0)
    throw std::invalid_argument("build_model: moving cost must be negative");

  PomdpModel m;
  m.n_states = 10;
  m.n_actions = 4;
  m.n_observations = 2;
  m.discount = cfg.discount;
  m.transition.assign(m.n_states, std::vector<std::vector<double>>(
                                      m.n_actions, std::vector<double>(m.n_states, 0.0)));
  m.observation.assign(m.n_states, std::vector<std::vector<double>>(
                                       m.n_actions, std::vector<double>(m.n_observations, 0.0)));
  m.reward.assign(m.n_states, std::vector<double>(m.n_actions, 0.0));

  for (std::size_t h = 0; h < 3; ++h) {
    for (std::size_t w = 0; w < 3; ++w) {
      std::size_t s = wumpus_state(h, w);
      const Tile& hunter = kHunterTiles[h];
      const Tile& wumpus = kWumpusTiles[w];
      for (std::size_t a = 0; a < m.n_actions; ++a) {
        if (is_move(a)) {
          Tile dest = move_destination(hunter, a);
          if (!traversable(dest)) dest = Tile{0, 0};
          std::size_t h2 = 0;
          while (kHunterTiles[h2] != dest) ++h2;
          m.transition[s][a][wumpus_state(h2, w)] = 1.0;
          m.reward[s][a] = cfg.moving_cost;
        } else {
          m.transition[s][a][kTerminalState] = 1.0;
          m.reward[s][a] =
              shot_hits(hunter, a, wumpus, cfg.ray_shooting) ? cfg.hit_reward : cfg.miss_reward;
        }
      }
      double stench = adjacency(hunter, wumpus) ? kStenchNear : kStenchFar;
      for (std::size_t a = 0; a < m.n_actions; ++a) {
        m.observation[s][a][STENCH] = stench;
        m.observation[s][a][NOTHING] = 1.0 - stench;
      }
    }
  }
  for (std::size_t a = 0; a < m.n_actions; ++a) {
    m.transition[kTerminalState][a][kTerminalState] = 1.0;
    m.observation[kTerminalState][a][NOTHING] = 1.0;
    m.reward[kTerminalState][a] = 0.0;
  }
  validate_model(m);
  return m;
}

// Hunter starts at (0,0) knowing its own position; the Wumpus is uniform.
inline Belief wumpus_initial_belief() {
  Belief b(10, 0.0);
  b[wumpus_state(0, 0)] = b[wumpus_state(0, 1)] = b[wumpus_state(0, 2)] = 1.0 / 3.0;
  return b;
}

}  // namespace smithian
