#pragma once

// Exact finite-horizon belief-space expectimax. Exponential in the horizon in
// the worst case, so it is budgeted and capped; with memoization on repeated
// posteriors it stays cheap on small models. Used as the reference the
// point-based solver is checked against.

#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "pomdp.hpp"

namespace smithian {

struct ExpectimaxResult {
  double value = 0.0;
  std::size_t best_action = 0;
};

struct ExpectimaxConfig {
  std::size_t max_horizon = 8;      // refuse deeper searches outright
  std::size_t node_budget = 2'000'000;
};

namespace detail {

// Beliefs reached by different observation histories can coincide; round to
// a fixed grid so they share one memo entry.
inline std::string belief_key(const Belief& b, std::size_t horizon) {
  std::string key = std::to_string(horizon);
  key.reserve(key.size() + b.size() * 16);
  for (double x : b) {
    key.push_back('|');
    key += std::to_string(std::llround(x * 1e12));
  }
  return key;
}

struct ExpectimaxSearch {
  const PomdpModel& m;
  const ExpectimaxConfig& cfg;
  std::size_t nodes = 0;
  std::map<std::string, ExpectimaxResult> memo;

  ExpectimaxResult run(const Belief& b, std::size_t horizon) {
    if (++nodes > cfg.node_budget)
      throw std::runtime_error("expectimax: node budget exhausted");
    if (horizon == 0) return ExpectimaxResult{0.0, 0};
    std::string key = belief_key(b, horizon);
    auto hit = memo.find(key);
    if (hit != memo.end()) return hit->second;

    ExpectimaxResult best{-std::numeric_limits<double>::infinity(), 0};
    for (std::size_t a = 0; a < m.n_actions; ++a) {
      double q = 0.0;
      for (std::size_t s = 0; s < m.n_states; ++s) q += b[s] * m.reward[s][a];
      auto obs_p = observation_probabilities(m, b, a);
      for (std::size_t o = 0; o < m.n_observations; ++o) {
        if (obs_p[o] <= 0.0) continue;
        Belief next = belief_update(m, b, a, o);
        q += m.discount * obs_p[o] * run(next, horizon - 1).value;
      }
      if (q > best.value) best = ExpectimaxResult{q, a};
    }
    memo.emplace(std::move(key), best);
    return best;
  }
};

}  // namespace detail

inline ExpectimaxResult expectimax(const PomdpModel& m, const Belief& b, std::size_t horizon,
                                   const ExpectimaxConfig& cfg = {}) {
  validate_model(m);
  validate_belief(m, b);
  if (horizon > cfg.max_horizon)
    throw std::invalid_argument("expectimax: horizon exceeds configured maximum");
  detail::ExpectimaxSearch search{m, cfg};
  return search.run(b, horizon);
}

}  // namespace smithian
