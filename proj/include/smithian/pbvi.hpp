#pragma once

// Point-based value iteration over a sampled belief set, with alpha-vector
// policies. The value function is initialized from blind (repeat-one-action)
// policies, so every vector is a sound lower bound and backups are monotone.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <vector>

#include "pomdp.hpp"
#include "rng.hpp"

namespace smithian {

struct AlphaVector {
  std::vector<double> coeffs;  // expected discounted return per state
  std::size_t action = 0;      // first action of the plan this vector represents

  double dot(const Belief& b) const {
    double v = 0.0;
    for (std::size_t s = 0; s < coeffs.size(); ++s) v += coeffs[s] * b[s];
    return v;
  }
};

class Policy {
 public:
  Policy() = default;
  Policy(std::vector<AlphaVector> vectors, double residual)
      : vectors_(std::move(vectors)), residual_(residual) {
    if (vectors_.empty()) throw std::invalid_argument("policy: no alpha vectors");
  }

  double value(const Belief& b) const {
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& v : vectors_) best = std::max(best, v.dot(b));
    return best;
  }

  // Index of the maximizing vector; ties resolve to the lowest action id,
  // then the lowest vector index, so the choice is deterministic.
  std::size_t best_vector(const Belief& b) const {
    std::size_t best_i = 0;
    double best_v = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < vectors_.size(); ++i) {
      double v = vectors_[i].dot(b);
      if (v > best_v || (v == best_v && vectors_[i].action < vectors_[best_i].action)) {
        best_v = v;
        best_i = i;
      }
    }
    return best_i;
  }

  std::size_t greedy_action(const Belief& b) const { return vectors_[best_vector(b)].action; }

  const std::vector<AlphaVector>& vectors() const { return vectors_; }
  double residual() const { return residual_; }

 private:
  std::vector<AlphaVector> vectors_;
  double residual_ = 0.0;
};

struct PbviConfig {
  std::size_t belief_points = 64;   // total budget for the sampled belief set
  std::size_t expansion_rounds = 3; // belief-set growth phases
  std::size_t backup_sweeps = 7;    // full Bellman sweeps over the point set (shared budget)
  double tolerance = 1e-6;          // early-stop residual
  double explore_epsilon = 0.1;     // uniform-action probability in expansion simulations
  std::size_t simulation_depth = 20;
  std::uint64_t seed = 0x5eedULL;
};

struct PbviDiagnostics {
  std::vector<Belief> points;  // final maintained belief set
  // Value at each maintained point after every sweep. Points only get
  // appended between rounds, so row prefixes line up across sweeps.
  std::vector<std::vector<double>> point_values_per_sweep;
};

namespace detail {

// Value of repeating one action forever: alpha_a = R(.,a) + gamma T_a alpha_a.
inline AlphaVector blind_policy_vector(const PomdpModel& m, std::size_t a) {
  std::vector<double> v(m.n_states, 0.0);
  for (std::size_t iter = 0; iter < 10000; ++iter) {
    double change = 0.0;
    std::vector<double> next(m.n_states);
    for (std::size_t s = 0; s < m.n_states; ++s) {
      double acc = m.reward[s][a];
      for (std::size_t s2 = 0; s2 < m.n_states; ++s2)
        acc += m.discount * m.transition[s][a][s2] * v[s2];
      next[s] = acc;
      change = std::max(change, std::abs(acc - v[s]));
    }
    v = std::move(next);
    if (change < 1e-12) break;
  }
  return AlphaVector{std::move(v), a};
}

// Point backup at belief b against the current vector set.
inline AlphaVector point_backup(const PomdpModel& m, const std::vector<AlphaVector>& gamma_set,
                                const Belief& b) {
  AlphaVector best;
  double best_v = -std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < m.n_actions; ++a) {
    std::vector<double> g(m.n_states);
    for (std::size_t s = 0; s < m.n_states; ++s) g[s] = m.reward[s][a];
    for (std::size_t o = 0; o < m.n_observations; ++o) {
      // choose argmax_i of the back-projected vector evaluated at b
      const AlphaVector* chosen = nullptr;
      std::vector<double> chosen_proj;
      double chosen_score = -std::numeric_limits<double>::infinity();
      for (const auto& av : gamma_set) {
        std::vector<double> proj(m.n_states, 0.0);
        for (std::size_t s = 0; s < m.n_states; ++s) {
          double acc = 0.0;
          const auto& row = m.transition[s][a];
          for (std::size_t s2 = 0; s2 < m.n_states; ++s2)
            acc += row[s2] * m.observation[s2][a][o] * av.coeffs[s2];
          proj[s] = acc;
        }
        double score = 0.0;
        for (std::size_t s = 0; s < m.n_states; ++s) score += proj[s] * b[s];
        if (score > chosen_score) {
          chosen_score = score;
          chosen = &av;
          chosen_proj = std::move(proj);
        }
      }
      (void)chosen;
      for (std::size_t s = 0; s < m.n_states; ++s) g[s] += m.discount * chosen_proj[s];
    }
    double v = 0.0;
    for (std::size_t s = 0; s < m.n_states; ++s) v += g[s] * b[s];
    if (v > best_v) {
      best_v = v;
      best = AlphaVector{std::move(g), a};
    }
  }
  return best;
}

inline double l1_distance(const Belief& a, const Belief& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d += std::abs(a[i] - b[i]);
  return d;
}

inline bool near_duplicate(const std::vector<Belief>& set, const Belief& b, double tol = 1e-9) {
  for (const auto& x : set)
    if (l1_distance(x, b) < tol) return true;
  return false;
}

}  // namespace detail

// Solves the POMDP approximately. The belief set starts from the initial
// belief plus every degenerate belief and grows by simulating the current
// greedy policy (with epsilon-uniform exploration) and keeping the most novel
// successors (farthest-point selection). Backups sweep the whole set; the
// sweep budget is shared across expansion rounds. Non-convergence within the
// budget is not an error: the last policy is returned with its residual.
inline Policy pbvi_solve(const PomdpModel& m, const PbviConfig& cfg, const Belief& initial,
                         PbviDiagnostics* diag = nullptr) {
  if (m.discount >= 1.0)
    throw std::invalid_argument("pbvi_solve: discount must be < 1 for infinite-horizon backups");
  validate_model(m);
  validate_belief(m, initial);
  if (cfg.backup_sweeps == 0) throw std::invalid_argument("pbvi_solve: zero backup sweeps");

  Rng rng(cfg.seed);

  std::vector<Belief> points;
  points.push_back(initial);
  for (std::size_t s = 0; s < m.n_states; ++s) {
    Belief e(m.n_states, 0.0);
    e[s] = 1.0;
    if (!detail::near_duplicate(points, e)) points.push_back(std::move(e));
  }

  std::vector<AlphaVector> gamma;
  for (std::size_t a = 0; a < m.n_actions; ++a)
    gamma.push_back(detail::blind_policy_vector(m, a));

  Policy policy(gamma, std::numeric_limits<double>::infinity());

  auto greedy_with = [&](const Belief& b) { return policy.greedy_action(b); };

  auto expand = [&](std::size_t target) {
    std::vector<Belief> candidates;
    for (std::size_t traj = 0; traj < 16 && candidates.size() < 512; ++traj) {
      Belief b = initial;
      std::size_t s = rng.next_index(initial);
      for (std::size_t depth = 0; depth < cfg.simulation_depth; ++depth) {
        std::size_t a = (rng.next_double() < cfg.explore_epsilon)
                            ? rng.next_below(m.n_actions)
                            : greedy_with(b);
        std::size_t s2 = rng.next_index(m.transition[s][a]);
        std::size_t o = rng.next_index(m.observation[s2][a]);
        b = belief_update(m, b, a, o);
        candidates.push_back(b);
        s = s2;
      }
    }
    while (points.size() < target && !candidates.empty()) {
      std::size_t far_i = 0;
      double far_d = -1.0;
      for (std::size_t i = 0; i < candidates.size(); ++i) {
        double d = std::numeric_limits<double>::infinity();
        for (const auto& p : points) d = std::min(d, detail::l1_distance(p, candidates[i]));
        if (d > far_d) {
          far_d = d;
          far_i = i;
        }
      }
      if (far_d < 1e-9) break;  // nothing novel left
      points.push_back(candidates[far_i]);
      candidates.erase(candidates.begin() + static_cast<std::ptrdiff_t>(far_i));
    }
  };

  double residual = std::numeric_limits<double>::infinity();
  std::size_t sweeps_left = cfg.backup_sweeps;
  std::size_t rounds = std::max<std::size_t>(cfg.expansion_rounds, 1);
  for (std::size_t round = 0; round < rounds && sweeps_left > 0; ++round) {
    if (round > 0 && points.size() < cfg.belief_points) {
      std::size_t remaining_rounds = rounds - round;
      std::size_t target = points.size() + (cfg.belief_points - points.size()) / remaining_rounds;
      expand(std::max(target, points.size() + 1));
    }
    std::size_t sweeps_this_round = sweeps_left / (rounds - round);
    if (sweeps_this_round == 0) sweeps_this_round = 1;
    for (std::size_t sweep = 0; sweep < sweeps_this_round && sweeps_left > 0; ++sweep) {
      --sweeps_left;
      std::vector<double> old_values(points.size());
      for (std::size_t i = 0; i < points.size(); ++i) old_values[i] = policy.value(points[i]);

      std::vector<AlphaVector> fresh;
      fresh.reserve(points.size());
      for (const auto& b : points) fresh.push_back(detail::point_backup(m, gamma, b));

      // union with the previous set, keep vectors that win somewhere
      std::vector<AlphaVector> unioned = gamma;
      for (auto& av : fresh) unioned.push_back(std::move(av));
      std::vector<bool> keep(unioned.size(), false);
      for (const auto& b : points) {
        std::size_t best_i = 0;
        double best_v = -std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < unioned.size(); ++i) {
          double v = unioned[i].dot(b);
          if (v > best_v || (v == best_v && unioned[i].action < unioned[best_i].action)) {
            best_v = v;
            best_i = i;
          }
        }
        keep[best_i] = true;
      }
      std::vector<AlphaVector> pruned;
      for (std::size_t i = 0; i < unioned.size(); ++i)
        if (keep[i]) pruned.push_back(std::move(unioned[i]));
      gamma = std::move(pruned);
      policy = Policy(gamma, residual);

      residual = 0.0;
      for (std::size_t i = 0; i < points.size(); ++i)
        residual = std::max(residual, std::abs(policy.value(points[i]) - old_values[i]));
      policy = Policy(gamma, residual);
      if (diag) {
        std::vector<double> vals(points.size());
        for (std::size_t i = 0; i < points.size(); ++i) vals[i] = policy.value(points[i]);
        diag->point_values_per_sweep.push_back(std::move(vals));
      }
      if (residual < cfg.tolerance) {
        if (diag) diag->points = points;
        return policy;
      }
    }
  }
  if (diag) diag->points = points;
  return policy;
}

}  // namespace smithian
