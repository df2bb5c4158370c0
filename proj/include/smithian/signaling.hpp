#pragma once

// Smithian utilities and the pointing loop. The signaler knows the true
// state, tracks the receiver's belief exactly, and scores candidate signals
// by how much the receiver's induced belief change helps — measured under the
// signaler's own belief (Smithian Value of Information). Signals are chosen
// by a softmax over SVI; receivers interpret them either literally (a POINT
// re-applies the stench likelihood) or pragmatically (Bayes over a simulated
// level-1 signaler).

#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <vector>

#include "pbvi.hpp"
#include "pomdp.hpp"
#include "rng.hpp"

namespace smithian {

enum Signal : std::size_t {
  POINT = 0,
  NO_POINT = 1,
};

struct SignalerConfig {
  double alpha = 5.0;  // rationality of the signal choice; may be +infinity
  std::array<double, 2> signal_cost{0.0, 0.0};  // kept at zero in canonical runs
  // Inside SVI the signaler models the receiver's next action as a softmax
  // over the receiver's own action values at this temperature. A hard-argmax
  // receiver model makes SVI blind to belief shifts that do not flip the
  // single best action; the soft model credits them in proportion.
  double receiver_temperature = 10.0;
};

// How an evaluation turns a receiver belief into an action distribution.
enum class ActionModel {
  GREEDY,   // all mass on the policy's greedy action
  SOFTMAX,  // mass proportional to exp(Q / temperature)
};

struct SignalingContext {
  const PomdpModel* model = nullptr;    // also carries the shared utility (rewards)
  const Policy* receiver_policy = nullptr;
  Belief signaler_belief;               // degenerate on the true state
  Belief receiver_belief;               // the signaler's copy of the receiver's belief
  std::size_t last_action = 0;          // the action that led to the current stench step
  std::size_t last_observation = 0;     // the observation a POINT refers to
  ActionModel action_model = ActionModel::GREEDY;
  double action_temperature = 5.0;      // used when action_model == SOFTMAX
};

using ReceiverInterpretation = std::function<Belief(const Belief&, Signal)>;

namespace detail {

// Value of the receiver's preferred plan (chosen at plan_belief), scored
// under eval_belief. With equal beliefs this is just the policy value.
inline double plan_value(const Policy& policy, const Belief& eval_belief,
                         const Belief& plan_belief) {
  return policy.vectors()[policy.best_vector(plan_belief)].dot(eval_belief);
}

inline std::vector<double> action_distribution(const SignalingContext& ctx, const Belief& b_rec) {
  const PomdpModel& m = *ctx.model;
  std::vector<double> p(m.n_actions, 0.0);
  if (ctx.action_model == ActionModel::GREEDY) {
    p[ctx.receiver_policy->greedy_action(b_rec)] = 1.0;
    return p;
  }
  auto value_fn = [&](const Belief& b) { return ctx.receiver_policy->value(b); };
  std::vector<double> q(m.n_actions);
  double q_max = -std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < m.n_actions; ++a) {
    q[a] = expected_utility(m, b_rec, a, value_fn);
    q_max = std::max(q_max, q[a]);
  }
  double total = 0.0;
  for (std::size_t a = 0; a < m.n_actions; ++a) {
    p[a] = std::exp((q[a] - q_max) / ctx.action_temperature);
    total += p[a];
  }
  for (auto& x : p) x /= total;
  return p;
}

}  // namespace detail

// Expected value, under the signaler's belief, of the receiver taking action
// a now and then following the plan it would pick at its own posterior. The
// immediate term and the observation mixture run on the signaler's belief;
// only the plan choice uses the receiver's.
inline double smithian_utility_of_action(const SignalingContext& ctx, std::size_t a) {
  const PomdpModel& m = *ctx.model;
  double u = 0.0;
  for (std::size_t s = 0; s < m.n_states; ++s) u += ctx.signaler_belief[s] * m.reward[s][a];
  auto obs_sig = observation_probabilities(m, ctx.signaler_belief, a);
  auto obs_rec = observation_probabilities(m, ctx.receiver_belief, a);
  for (std::size_t o = 0; o < m.n_observations; ++o) {
    if (obs_sig[o] <= 0.0) continue;
    Belief next_sig = belief_update(m, ctx.signaler_belief, a, o);
    // A receiver who assigned zero probability to o has no defined posterior;
    // fall back to planning at the signaler's. Unreachable in the game
    // (stench likelihoods are bounded away from 0 and 1).
    Belief next_rec = obs_rec[o] > 0.0 ? belief_update(m, ctx.receiver_belief, a, o) : next_sig;
    u += m.discount * obs_sig[o] * detail::plan_value(*ctx.receiver_policy, next_sig, next_rec);
  }
  return u;
}

// Mixes smithian_utility_of_action over the receiver's action distribution at
// b_rec (degenerate greedy by default).
inline double smithian_utility_of_belief(const SignalingContext& ctx, const Belief& b_rec) {
  auto p = detail::action_distribution(ctx, b_rec);
  SignalingContext eval = ctx;
  eval.receiver_belief = b_rec;
  double u = 0.0;
  for (std::size_t a = 0; a < p.size(); ++a) {
    if (p[a] <= 0.0) continue;
    u += p[a] * smithian_utility_of_action(eval, a);
  }
  return u;
}

// Signals only exist on stench steps; the literal reading of POINT is one
// more application of the pointed observation's likelihood, no transition.
inline Belief literal_interpret(const PomdpModel& m, const Belief& b_rec, Signal u,
                                std::size_t last_obs, std::size_t last_action) {
  validate_belief(m, b_rec);
  if (u == NO_POINT) return b_rec;
  Belief next(m.n_states);
  double total = 0.0;
  for (std::size_t s = 0; s < m.n_states; ++s) {
    next[s] = m.observation[s][last_action][last_obs] * b_rec[s];
    total += next[s];
  }
  if (total <= 0.0)
    throw std::domain_error("literal_interpret: observation impossible under belief");
  for (auto& x : next) x /= total;
  return next;
}

inline double svi(const SignalingContext& ctx, Signal u, const ReceiverInterpretation& receiver) {
  Belief shifted = receiver(ctx.receiver_belief, u);
  return smithian_utility_of_belief(ctx, shifted) -
         smithian_utility_of_belief(ctx, ctx.receiver_belief);
}

// P(u) ∝ exp{alpha·[SVI(u) − cost(u)]}. At alpha = 0 this is exactly uniform;
// at alpha = +infinity it is the argmax with ties resolved to NO_POINT (a
// content-free point is suppressed).
inline std::array<double, 2> signaler_distribution(const SignalingContext& ctx,
                                                   const SignalerConfig& cfg,
                                                   const ReceiverInterpretation& receiver) {
  if (!(cfg.alpha >= 0.0))
    throw std::invalid_argument("signaler_distribution: alpha must be non-negative");
  std::array<double, 2> score{svi(ctx, POINT, receiver) - cfg.signal_cost[POINT],
                              svi(ctx, NO_POINT, receiver) - cfg.signal_cost[NO_POINT]};
  if (std::isinf(cfg.alpha)) {
    if (score[POINT] > score[NO_POINT]) return {1.0, 0.0};
    return {0.0, 1.0};
  }
  double m = std::max(score[POINT], score[NO_POINT]);
  std::array<double, 2> w{std::exp(cfg.alpha * (score[POINT] - m)),
                          std::exp(cfg.alpha * (score[NO_POINT] - m))};
  double total = w[0] + w[1];
  return {w[0] / total, w[1] / total};
}

// Bayes over a state-conditional signaler: b'(s) ∝ P_sig(u|s)·b_rec(s).
inline Belief pragmatic_interpret(const Belief& b_rec, Signal u,
                                  const std::function<std::array<double, 2>(std::size_t)>& signaler_fn) {
  Belief next(b_rec.size(), 0.0);
  double total = 0.0;
  for (std::size_t s = 0; s < b_rec.size(); ++s) {
    if (b_rec[s] <= 0.0) continue;
    next[s] = signaler_fn(s)[u] * b_rec[s];
    total += next[s];
  }
  if (total <= 0.0) throw std::domain_error("pragmatic_interpret: incoherent signal");
  for (auto& x : next) x /= total;
  return next;
}

// Literal receiver bound to the context's stench step.
inline ReceiverInterpretation literal_receiver(const SignalingContext& ctx) {
  const PomdpModel* m = ctx.model;
  std::size_t o = ctx.last_observation;
  std::size_t a = ctx.last_action;
  return [m, o, a](const Belief& b, Signal u) { return literal_interpret(*m, b, u, o, a); };
}

namespace detail {

inline SignalingContext signaler_view(const SignalingContext& ctx, const SignalerConfig& cfg) {
  SignalingContext view = ctx;
  view.action_model = ActionModel::SOFTMAX;
  view.action_temperature = cfg.receiver_temperature;
  return view;
}

}  // namespace detail

// Level-1 signaler under the hypothesis that the true state is s, used by the
// pragmatic receiver to invert the observed signal.
inline std::array<double, 2> hypothetical_signaler_distribution(const SignalingContext& ctx,
                                                                const SignalerConfig& cfg,
                                                                std::size_t s) {
  SignalingContext view = detail::signaler_view(ctx, cfg);
  view.signaler_belief.assign(ctx.model->n_states, 0.0);
  view.signaler_belief[s] = 1.0;
  return signaler_distribution(view, cfg, literal_receiver(view));
}

struct GuideStep {
  Signal signal = NO_POINT;
  double svi_point = 0.0;
  double svi_no_point = 0.0;
  std::array<double, 2> distribution{0.5, 0.5};
};

// One stench-step decision by the guide: score both signals against the
// literal receiver and sample from the softmax.
inline GuideStep guide_step(const SignalingContext& ctx, const SignalerConfig& cfg, Rng& rng) {
  SignalingContext view = detail::signaler_view(ctx, cfg);
  auto receiver = literal_receiver(view);
  GuideStep step;
  step.svi_point = svi(view, POINT, receiver);
  step.svi_no_point = svi(view, NO_POINT, receiver);
  step.distribution = signaler_distribution(view, cfg, receiver);
  step.signal = rng.next_double() < step.distribution[POINT] ? POINT : NO_POINT;
  return step;
}

}  // namespace smithian
