#pragma once

// Finite POMDP model: dense transition/observation/reward tables over integer
// state, action, and observation ids, plus belief-space primitives.

#include <cmath>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace smithian {

using Belief = std::vector<double>;

struct PomdpModel {
  std::size_t n_states = 0;
  std::size_t n_actions = 0;
  std::size_t n_observations = 0;
  double discount = 0.95;

  // transition[s][a][s'], observation[s'][a][o], reward[s][a]
  std::vector<std::vector<std::vector<double>>> transition;
  std::vector<std::vector<std::vector<double>>> observation;
  std::vector<std::vector<double>> reward;

  double trans(std::size_t s, std::size_t a, std::size_t s2) const { return transition[s][a][s2]; }
  double obs(std::size_t s2, std::size_t a, std::size_t o) const { return observation[s2][a][o]; }
  double rew(std::size_t s, std::size_t a) const { return reward[s][a]; }
};

inline void validate_model(const PomdpModel& m, double tol = 1e-9) {
  if (m.n_states == 0 || m.n_actions == 0 || m.n_observations == 0)
    throw std::invalid_argument("model: empty state, action, or observation space");
  if (!(m.discount > 0.0) || m.discount > 1.0)
    throw std::invalid_argument("model: discount must be in (0, 1]");
  if (m.transition.size() != m.n_states || m.observation.size() != m.n_states ||
      m.reward.size() != m.n_states)
    throw std::invalid_argument("model: table dimensions do not match state count");
  for (std::size_t s = 0; s < m.n_states; ++s) {
    for (std::size_t a = 0; a < m.n_actions; ++a) {
      double tsum = 0.0;
      for (std::size_t s2 = 0; s2 < m.n_states; ++s2) {
        double p = m.transition[s][a][s2];
        if (p < 0.0) throw std::invalid_argument("model: negative transition probability");
        tsum += p;
      }
      if (std::abs(tsum - 1.0) > tol)
        throw std::invalid_argument("model: transition row does not sum to 1");
      double osum = 0.0;
      for (std::size_t o = 0; o < m.n_observations; ++o) {
        double p = m.observation[s][a][o];
        if (p < 0.0) throw std::invalid_argument("model: negative observation probability");
        osum += p;
      }
      if (std::abs(osum - 1.0) > tol)
        throw std::invalid_argument("model: observation row does not sum to 1");
    }
  }
}

inline void validate_belief(const PomdpModel& m, const Belief& b, double tol = 1e-9) {
  if (b.size() != m.n_states) throw std::invalid_argument("belief: wrong dimension");
  double sum = 0.0;
  for (double p : b) {
    if (p < -tol) throw std::invalid_argument("belief: negative entry");
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-6) throw std::invalid_argument("belief: entries do not sum to 1");
}

// P(s'|b,a): transition prediction before the observation arrives.
inline Belief predict(const PomdpModel& m, const Belief& b, std::size_t a) {
  Belief pred(m.n_states, 0.0);
  for (std::size_t s = 0; s < m.n_states; ++s) {
    double bs = b[s];
    if (bs == 0.0) continue;
    const auto& row = m.transition[s][a];
    for (std::size_t s2 = 0; s2 < m.n_states; ++s2) pred[s2] += row[s2] * bs;
  }
  return pred;
}

// P(o|b,a) for every o.
inline std::vector<double> observation_probabilities(const PomdpModel& m, const Belief& b,
                                                     std::size_t a) {
  Belief pred = predict(m, b, a);
  std::vector<double> po(m.n_observations, 0.0);
  for (std::size_t s2 = 0; s2 < m.n_states; ++s2) {
    double p = pred[s2];
    if (p == 0.0) continue;
    for (std::size_t o = 0; o < m.n_observations; ++o) po[o] += m.observation[s2][a][o] * p;
  }
  return po;
}

// Bayes update: b'(s') ∝ P(o|s',a) Σ_s P(s'|a,s) b(s).
inline Belief belief_update(const PomdpModel& m, const Belief& b, std::size_t a, std::size_t o) {
  if (a >= m.n_actions) throw std::invalid_argument("belief_update: action out of range");
  if (o >= m.n_observations) throw std::invalid_argument("belief_update: observation out of range");
  Belief post = predict(m, b, a);
  double norm = 0.0;
  for (std::size_t s2 = 0; s2 < m.n_states; ++s2) {
    post[s2] *= m.observation[s2][a][o];
    norm += post[s2];
  }
  if (norm <= 0.0) throw std::domain_error("belief_update: impossible observation");
  for (double& p : post) p /= norm;
  return post;
}

// One-step lookahead utility of an action: immediate reward plus discounted
// expected value of the successor belief under value_fn. Zero-probability
// observation branches contribute nothing and are skipped.
inline double expected_utility(const PomdpModel& m, const Belief& b, std::size_t a,
                               const std::function<double(const Belief&)>& value_fn) {
  double q = 0.0;
  for (std::size_t s = 0; s < m.n_states; ++s) q += b[s] * m.reward[s][a];
  std::vector<double> po = observation_probabilities(m, b, a);
  for (std::size_t o = 0; o < m.n_observations; ++o) {
    if (po[o] <= 0.0) continue;
    q += m.discount * po[o] * value_fn(belief_update(m, b, a, o));
  }
  return q;
}

}  // namespace smithian
