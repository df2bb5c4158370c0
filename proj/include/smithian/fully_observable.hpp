#pragma once

// Value iteration on the underlying MDP, ignoring partial observability.
// Gives the clairvoyant upper baseline for the experiments. The discount
// defaults to 1 (undiscounted shortest-path-style objective), which is well
// defined as long as some policy reaches an absorbing zero-reward state and
// endless wandering is strictly penalized; iteration then terminates exactly.

#include <cmath>
#include <stdexcept>
#include <vector>

#include "pomdp.hpp"

namespace smithian {

struct FullyObservableSolution {
  std::vector<double> values;        // optimal state values
  std::vector<std::size_t> actions;  // a greedy optimal action per state
  std::size_t iterations = 0;
  double residual = 0.0;
};

inline FullyObservableSolution solve_fully_observable(const PomdpModel& m, double discount = 1.0,
                                                      double tolerance = 1e-12,
                                                      std::size_t max_iterations = 100000) {
  validate_model(m);
  if (discount <= 0.0 || discount > 1.0)
    throw std::invalid_argument("solve_fully_observable: discount must be in (0, 1]");

  FullyObservableSolution sol;
  sol.values.assign(m.n_states, 0.0);
  sol.actions.assign(m.n_states, 0);

  for (sol.iterations = 0; sol.iterations < max_iterations; ++sol.iterations) {
    double change = 0.0;
    std::vector<double> next(m.n_states);
    for (std::size_t s = 0; s < m.n_states; ++s) {
      double best = -std::numeric_limits<double>::infinity();
      std::size_t best_a = 0;
      for (std::size_t a = 0; a < m.n_actions; ++a) {
        double q = m.reward[s][a];
        for (std::size_t s2 = 0; s2 < m.n_states; ++s2)
          q += discount * m.transition[s][a][s2] * sol.values[s2];
        if (q > best) {
          best = q;
          best_a = a;
        }
      }
      next[s] = best;
      sol.actions[s] = best_a;
      change = std::max(change, std::abs(best - sol.values[s]));
    }
    sol.values = std::move(next);
    sol.residual = change;
    if (change < tolerance) return sol;
  }
  throw std::runtime_error("solve_fully_observable: value iteration did not converge");
}

}  // namespace smithian
