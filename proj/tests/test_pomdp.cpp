#include <catch2/catch_amalgamated.hpp>

#include <chrono>
#include <cmath>
#include <stdexcept>

#include "smithian/pbvi.hpp"
#include "smithian/pomdp.hpp"
#include "smithian/rng.hpp"
#include "smithian/wumpus.hpp"
#include "test_util.hpp"

using namespace smithian;

namespace {

// Reference update: b'(s') ∝ O[s'][a][o] * sum_s T[s][a][s'] b(s).
Belief brute_force_update(const PomdpModel& m, const Belief& b, std::size_t a, std::size_t o) {
  Belief out(m.n_states, 0.0);
  double total = 0.0;
  for (std::size_t sp = 0; sp < m.n_states; ++sp) {
    double mass = 0.0;
    for (std::size_t s = 0; s < m.n_states; ++s) mass += m.transition[s][a][sp] * b[s];
    out[sp] = m.observation[sp][a][o] * mass;
    total += out[sp];
  }
  for (double& x : out) x /= total;
  return out;
}

}  // namespace

TEST_CASE("model validation accepts the hunt model and rejects broken tables") {
  PomdpModel m = build_model(testutil::wumpus_cfg(-1.0));
  REQUIRE_NOTHROW(validate_model(m));

  SECTION("transition row must sum to one") {
    PomdpModel bad = m;
    bad.transition[0][0][0] += 0.25;
    REQUIRE_THROWS_AS(validate_model(bad), std::invalid_argument);
  }
  SECTION("observation row must sum to one") {
    PomdpModel bad = m;
    bad.observation[3][0][0] = 0.0;
    REQUIRE_THROWS_AS(validate_model(bad), std::invalid_argument);
  }
  SECTION("probabilities must be non-negative") {
    PomdpModel bad = m;
    bad.transition[0][0][0] = -0.5;
    bad.transition[0][0][3] = 1.5;
    REQUIRE_THROWS_AS(validate_model(bad), std::invalid_argument);
  }
  SECTION("discount must lie in [0, 1]") {
    PomdpModel bad = m;
    bad.discount = 1.25;
    REQUIRE_THROWS_AS(validate_model(bad), std::invalid_argument);
  }
}

TEST_CASE("belief validation") {
  PomdpModel m = build_model(testutil::wumpus_cfg(-1.0));
  REQUIRE_NOTHROW(validate_belief(m, wumpus_initial_belief()));
  REQUIRE_THROWS_AS(validate_belief(m, Belief(10, 0.2)), std::invalid_argument);
  REQUIRE_THROWS_AS(validate_belief(m, Belief(9, 1.0 / 9.0)), std::invalid_argument);
  Belief neg(10, 0.0);
  neg[0] = 1.5;
  neg[1] = -0.5;
  REQUIRE_THROWS_AS(validate_belief(m, neg), std::invalid_argument);
}

TEST_CASE("first move plus stench lands on the 17/37 posterior") {
  PomdpModel m = build_model(testutil::wumpus_cfg(-1.0));
  Belief b = belief_update(m, wumpus_initial_belief(), MOVE_VERTICAL, STENCH);

  // Hunter is at (0,1) for sure; only (2,0) is far from it.
  REQUIRE(b[wumpus_state(1, 0)] == Catch::Approx(17.0 / 37.0).margin(1e-12));
  REQUIRE(b[wumpus_state(1, 1)] == Catch::Approx(17.0 / 37.0).margin(1e-12));
  REQUIRE(b[wumpus_state(1, 2)] == Catch::Approx(3.0 / 37.0).margin(1e-12));
  for (std::size_t s : {0, 1, 2, 6, 7, 8, 9}) REQUIRE(b[s] == 0.0);
}

TEST_CASE("uniform observation likelihood leaves the wumpus marginal unchanged") {
  PomdpModel m = build_model(testutil::wumpus_cfg(-1.0));
  Rng rng(11);
  for (int i = 0; i < 20; ++i) {
    // From (0,1) both moves land on (0,0), where every wumpus tile is far:
    // the stench likelihood is flat, so only the motion part matters.
    Belief b = testutil::random_wumpus_belief(rng, 1);
    for (std::size_t o : {std::size_t(STENCH), std::size_t(NOTHING)}) {
      Belief next = belief_update(m, b, MOVE_VERTICAL, o);
      for (std::size_t w = 0; w < 3; ++w)
        REQUIRE(next[wumpus_state(0, w)] == Catch::Approx(b[wumpus_state(1, w)]).margin(1e-12));
    }
  }
}

TEST_CASE("degenerate belief with deterministic motion stays degenerate") {
  PomdpModel m = build_model(testutil::wumpus_cfg(-1.0));
  Belief b = testutil::degenerate(10, wumpus_state(0, 1));
  for (std::size_t o : {std::size_t(STENCH), std::size_t(NOTHING)}) {
    Belief next = belief_update(m, b, MOVE_VERTICAL, o);
    REQUIRE(next[wumpus_state(1, 1)] == 1.0);
  }
}

TEST_CASE("zero-probability observation is rejected") {
  PomdpModel m = build_model(testutil::wumpus_cfg(-1.0));
  Belief at_terminal = testutil::degenerate(10, kTerminalState);
  REQUIRE_THROWS_AS(belief_update(m, at_terminal, MOVE_VERTICAL, STENCH), std::domain_error);
}

TEST_CASE("belief update matches direct enumeration on random triples") {
  PomdpModel m = build_model(testutil::wumpus_cfg(-3.0));
  Rng rng(2024);
  double worst = 0.0;
  auto start = std::chrono::steady_clock::now();
  for (int i = 0; i < 1000; ++i) {
    std::size_t hunter = rng.next_below(3);
    Belief b = testutil::random_wumpus_belief(rng, hunter);
    std::size_t a = rng.next_below(4);
    // Shots land on the silent terminal state, so only NOTHING is reachable.
    std::size_t o = is_move(static_cast<WumpusAction>(a)) ? rng.next_below(2) : NOTHING;
    Belief got = belief_update(m, b, a, o);
    Belief want = brute_force_update(m, b, a, o);
    for (std::size_t s = 0; s < 10; ++s) worst = std::max(worst, std::abs(got[s] - want[s]));
  }
  double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  REQUIRE(worst < 1e-10);
  REQUIRE(elapsed < 1.0);
}

TEST_CASE("observation_probabilities is a distribution consistent with updates") {
  PomdpModel m = build_model(testutil::wumpus_cfg(-5.0));
  Rng rng(7);
  for (int i = 0; i < 50; ++i) {
    Belief b = testutil::random_wumpus_belief(rng, rng.next_below(3));
    std::size_t a = rng.next_below(m.n_actions);
    std::vector<double> po = observation_probabilities(m, b, a);
    REQUIRE(po.size() == m.n_observations);
    double total = 0.0;
    for (double p : po) {
      REQUIRE(p >= 0.0);
      total += p;
    }
    REQUIRE(total == Catch::Approx(1.0).margin(1e-12));
  }
}

TEST_CASE("expected utility of a self-loop equals the geometric series") {
  PomdpModel m = testutil::single_state_model(3.0, 0.9);
  Belief b{1.0};
  auto fixed_point = [](const Belief&) { return 30.0; };  // 3 / (1 - 0.9)
  REQUIRE(expected_utility(m, b, 0, fixed_point) == Catch::Approx(30.0).margin(1e-12));
}

TEST_CASE("expected utility of a certain shot is the shot reward") {
  PomdpModel m = build_model(testutil::wumpus_cfg(-1.0));
  auto zero = [](const Belief&) { return 0.0; };
  Belief hit = testutil::degenerate(10, wumpus_state(1, 0));   // hunter (0,1), wumpus (0,2)
  Belief miss = testutil::degenerate(10, wumpus_state(1, 1));  // hunter (0,1), wumpus (1,1)
  REQUIRE(expected_utility(m, hit, SHOOT_UP, zero) == Catch::Approx(100.0).margin(1e-12));
  REQUIRE(expected_utility(m, miss, SHOOT_UP, zero) == Catch::Approx(-100.0).margin(1e-12));
  REQUIRE(expected_utility(m, miss, SHOOT_RIGHT, zero) == Catch::Approx(100.0).margin(1e-12));
}

TEST_CASE("greedy action selection over alpha vectors") {
  SECTION("a single vector wins everywhere") {
    Policy p({AlphaVector{std::vector<double>(10, 1.0), 2}}, 0.0);
    Rng rng(5);
    for (int i = 0; i < 10; ++i)
      REQUIRE(p.greedy_action(testutil::random_wumpus_belief(rng, 0)) == 2);
  }
  SECTION("exact ties resolve to the lower action index") {
    Policy p({AlphaVector{std::vector<double>(10, 1.0), 3},
              AlphaVector{std::vector<double>(10, 1.0), 1}},
             0.0);
    REQUIRE(p.greedy_action(wumpus_initial_belief()) == 1);
  }
  SECTION("positive scaling never changes the greedy choice") {
    PomdpModel m = build_model(testutil::wumpus_cfg(-1.0));
    Policy p = pbvi_solve(m, PbviConfig{}, wumpus_initial_belief());
    std::vector<AlphaVector> bigger = p.vectors();
    for (auto& v : bigger)
      for (double& c : v.coeffs) c *= 4.0;
    Policy scaled(std::move(bigger), p.residual());
    Rng rng(99);
    for (int i = 0; i < 200; ++i) {
      Belief b = testutil::random_wumpus_belief(rng, rng.next_below(3));
      REQUIRE(scaled.greedy_action(b) == p.greedy_action(b));
      REQUIRE(scaled.value(b) == Catch::Approx(4.0 * p.value(b)).margin(1e-9));
    }
  }
}
