#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "fixtures.hpp"
#include "skirmish/value.hpp"

using namespace skirmish;
using namespace skirmish::test;

namespace {

/// Replays an episode with the given policies and returns (terminal state, steps taken).
GameState play_out(GameState s, const Policy& allied, const Policy& enemy) {
    while (!s.terminal())
        s = step(s, greedy_joint_action(allied, s, Team::allied),
                 greedy_joint_action(enemy, s, Team::enemy))
                .state;
    return s;
}

}  // namespace

TEST_CASE("one step from mutual annihilation returns zero") {
    GameState s = duel(2, 2, 2);
    PolicyHandle c = make_attack_closest();
    PolicyHandle w = make_attack_weakest();
    JointAction first{{0, Action::attack(0)}};
    CHECK(rollout_return(s, first, *c, *w, 0.7) == doctest::Approx(0.0));
}

TEST_CASE("with lambda 1 the rollout return equals the replayed terminal reward") {
    Scenario sc = small_scenario(2, 2);
    PolicyHandle c = make_attack_closest();
    PolicyHandle w = make_attack_weakest();
    GameState s = spawn(sc, 21);
    JointAction first = greedy_joint_action(*c, s, Team::allied);
    double ret = rollout_return(s, first, *c, *w, 1.0);
    GameState end = play_out(s, *c, *w);
    CHECK(ret == doctest::Approx(terminal_reward(end)));
}

TEST_CASE("discount scaling follows the closed form") {
    Scenario sc = small_scenario(2, 2);
    PolicyHandle c = make_attack_closest();
    PolicyHandle w = make_attack_weakest();
    GameState s = spawn(sc, 8);
    JointAction first = greedy_joint_action(*c, s, Team::allied);
    GameState end = play_out(s, *c, *w);
    int exponent = end.step_count - 1 - s.step_count;
    double base = rollout_return(s, first, *c, *w, 1.0);
    double discounted = rollout_return(s, first, *c, *w, 0.9);
    CHECK(discounted == doctest::Approx(base * std::pow(0.9, exponent)));
}

TEST_CASE("rollouts are deterministic and reject terminal states") {
    Scenario sc = small_scenario(2, 2);
    PolicyHandle c = make_attack_closest();
    PolicyHandle w = make_attack_weakest();
    GameState s = spawn(sc, 5);
    RolloutQ q = make_q_demo(c, w, 1.0);
    JointAction first = greedy_joint_action(*c, s, Team::allied);
    CHECK(q(s, first) == q(s, first));

    GameState dead = duel(0, 5, 2);
    CHECK_THROWS_AS(rollout_return(dead, {}, *c, *w, 1.0), TerminalStateError);
}

TEST_CASE("q_demo of the demonstration's own action equals its episode return") {
    Scenario sc = small_scenario(2, 2);
    PolicyHandle c = make_attack_closest();
    PolicyHandle w = make_attack_weakest();
    GameState s = spawn(sc, 13);
    RolloutQ q = make_q_demo(c, w, 1.0);
    JointAction own = greedy_joint_action(*c, s, Team::allied);
    GameState end = play_out(s, *c, *w);
    CHECK(q(s, own) == doctest::Approx(terminal_reward(end)));
}

TEST_CASE("in a won position every q_demo value shares the winning sign") {
    // Lone healthy ally vs a nearly dead enemy: the demonstrator wins from
    // any first action.
    GameState s = make_state({unit(Team::allied, 0, {4, 4}, 12, marine()),
                              unit(Team::enemy, 0, {6, 4}, 2, marine(12, 4, 3, 1, 3))});
    PolicyHandle c = make_attack_closest();
    RolloutQ q = make_q_demo(c, c, 1.0);
    for (const Action& a : legal_actions(s, 0)) {
        JointAction first{{0, a}};
        CHECK(q(s, first) > 0.0);
    }
}

TEST_CASE("q_theta equals q_demo when the learned policy is the demonstration") {
    Scenario sc = small_scenario(2, 2);
    PolicyHandle c = make_attack_closest();
    PolicyHandle w = make_attack_weakest();
    GameState s = spawn(sc, 30);
    RolloutQ qd = make_q_demo(c, w, 1.0);
    RolloutQ qt = make_q_theta(c, w, 1.0);
    for (int id : s.living_units(Team::allied)) {
        for (const Action& a : legal_actions(s, id)) {
            JointAction first = greedy_joint_action(*c, s, Team::allied);
            first[id] = a;
            CHECK(qt(s, first) == doctest::Approx(qd(s, first)));
        }
    }
}

TEST_CASE("q_combined dominates both components pointwise") {
    Scenario sc = small_scenario(2, 2);
    PolicyHandle c = make_attack_closest();
    PolicyHandle w = make_attack_weakest();
    GameState s = spawn(sc, 31);
    RolloutQ qd = make_q_demo(c, w, 1.0);
    RolloutQ qt = make_q_theta(w, w, 1.0);  // a different continuation
    QFunction q = q_combined(qt, qd);
    for (const Action& a : legal_actions(s, s.living_units(Team::allied)[0])) {
        JointAction first = greedy_joint_action(*c, s, Team::allied);
        first[s.living_units(Team::allied)[0]] = a;
        double v = q(s, first);
        CHECK(v >= qd(s, first) - 1e-12);
        CHECK(v >= qt(s, first) - 1e-12);
        CHECK(v == doctest::Approx(std::max(qd(s, first), qt(s, first))));
    }
}

TEST_CASE("positive integer hp scaling scales every Q by the same factor") {
    GameState s = duel(5, 5, 2);
    PolicyHandle c = make_attack_closest();
    RolloutQ q1 = make_q_demo(c, c, 1.0);
    JointAction first{{0, Action::attack(0)}};
    double base = q1(s, first);

    GameState scaled = s;
    const int factor = 3;
    for (auto& u : scaled.units) {
        u.hp *= factor;
        u.spec.max_hp *= factor;
        u.spec.damage *= factor;
    }
    RolloutQ q2 = make_q_demo(c, c, 1.0);
    CHECK(q2(scaled, first) == doctest::Approx(factor * base));
}

TEST_CASE("lemma 1 holds on seeded 2v2 states") {
    Scenario sc = small_scenario(2, 2);
    Lemma1Report report =
        check_lemma1(sc, make_attack_closest(), make_attack_weakest(), 8, 99, 1.0, 5);
    CHECK(report.samples.size() == 8);
    CHECK(report.violations == 0);
    // Report serialization carries every sample.
    CHECK(report.to_json().find("q_nash") != std::string::npos);
}

TEST_CASE("lemma 1 inputs are validated") {
    Scenario sc = small_scenario(1, 1);
    CHECK_THROWS_AS(check_lemma1(sc, make_attack_closest(), make_attack_weakest(), 0, 1),
                    EmptyRequestError);
}
