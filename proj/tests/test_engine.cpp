#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "fixtures.hpp"
#include "skirmish/serialize.hpp"

using namespace skirmish;
using namespace skirmish::test;

TEST_CASE("mutual attack resolves against the pre-step snapshot") {
    GameState s = duel(5, 5, 2);
    JointAction allied{{0, Action::attack(0)}};
    JointAction enemy{{1, Action::attack(0)}};
    GameState next = step(s, allied, enemy).state;
    CHECK(next.units[0].hp == 3);
    CHECK(next.units[1].hp == 3);
    CHECK(next.units[0].cooldown == 1);
    CHECK(next.units[1].cooldown == 1);
    CHECK(next.step_count == 1);
}

TEST_CASE("pure move shifts position only") {
    GameState s = make_state({unit(Team::allied, 0, {4, 4}, 5, marine()),
                              unit(Team::enemy, 0, {9, 9}, 5, marine())});
    GameState next = step(s, {{0, Action::move(MoveDir::right)}},
                          {{1, Action::move(MoveDir::left)}})
                         .state;
    CHECK(next.units[0].pos == Vec2i(5, 4));
    CHECK(next.units[0].hp == 5);
    CHECK(next.units[0].cooldown == 0);
}

TEST_CASE("mutual lethal attacks kill both simultaneously") {
    GameState s = duel(2, 2, 2);
    GameState next = step(s, {{0, Action::attack(0)}}, {{1, Action::attack(0)}}).state;
    CHECK(next.units[0].hp == 0);
    CHECK(next.units[1].hp == 0);
    CHECK(next.terminal());
    CHECK(terminal_reward(next) == 0);
}

TEST_CASE("step rejects terminal states and illegal actions") {
    GameState s = duel(2, 2, 2);
    GameState done = step(s, {{0, Action::attack(0)}}, {{1, Action::attack(0)}}).state;
    CHECK_THROWS_AS(step(done, {}, {}), AlreadyTerminalError);

    // Attack with cooldown up is illegal.
    GameState cd = duel();
    cd.units[0].cooldown = 1;
    CHECK_THROWS_AS(step(cd, {{0, Action::attack(0)}}, {{1, Action::attack(0)}}), IllegalActionError);
}

TEST_CASE("terminal reward is the surviving hp differential") {
    GameState s = make_state({unit(Team::allied, 0, {2, 2}, 7, marine()),
                              unit(Team::allied, 1, {2, 3}, 5, marine()),
                              unit(Team::enemy, 0, {8, 8}, 0, marine())});
    CHECK(s.terminal());
    CHECK(terminal_reward(s) == 12);

    GameState timeout = make_state({unit(Team::allied, 0, {2, 2}, 7, marine()),
                                    unit(Team::enemy, 0, {8, 8}, 10, marine())});
    timeout.step_count = timeout.max_steps;
    CHECK(timeout.terminal());
    CHECK(terminal_reward(timeout) == -3);

    GameState live = duel();
    CHECK_THROWS_AS(terminal_reward(live), NotTerminalError);
}

TEST_CASE("normalized reward divides by initial allied hp") {
    GameState initial = make_state({unit(Team::allied, 0, {2, 2}, 100, marine(100)),
                                    unit(Team::enemy, 0, {8, 8}, 100, marine(100))});
    GameState won = initial;
    won.units[0].hp = 46;
    won.units[1].hp = 0;
    CHECK(normalized_reward(won, initial) == doctest::Approx(0.46));

    GameState wiped = initial;
    wiped.units[0].hp = 0;
    CHECK(normalized_reward(wiped, initial) == doctest::Approx(-1.0));

    GameState mutual = wiped;
    mutual.units[1].hp = 0;
    CHECK(normalized_reward(mutual, initial) == doctest::Approx(0.0));
}

TEST_CASE("legal actions respect map bounds, occupancy, cooldown and range") {
    // Corner agent: only right and down moves stay on-map.
    GameState corner = make_state({unit(Team::allied, 0, {0, 0}, 5, marine()),
                                   unit(Team::enemy, 0, {9, 9}, 5, marine())});
    auto legal = legal_actions(corner, 0);
    CHECK(std::find(legal.begin(), legal.end(), Action::move(MoveDir::left)) == legal.end());
    CHECK(std::find(legal.begin(), legal.end(), Action::move(MoveDir::up)) == legal.end());
    CHECK(std::find(legal.begin(), legal.end(), Action::move(MoveDir::right)) != legal.end());
    CHECK(std::find(legal.begin(), legal.end(), Action::move(MoveDir::down)) != legal.end());
    // Enemy out of range: no attacks even at cooldown 0.
    for (const auto& a : legal) CHECK(a.kind == Action::Kind::move);

    // Cooldown gates attacks.
    GameState cd = duel();
    cd.units[0].cooldown = 1;
    for (const auto& a : legal_actions(cd, 0)) CHECK(a.kind == Action::Kind::move);
    cd.units[0].cooldown = 0;
    auto with_attack = legal_actions(cd, 0);
    CHECK(std::count_if(with_attack.begin(), with_attack.end(),
                        [](const Action& a) { return a.kind == Action::Kind::attack; }) == 1);

    CHECK_THROWS_AS(legal_actions(make_state({unit(Team::allied, 0, {0, 0}, 0, marine()),
                                              unit(Team::enemy, 0, {9, 9}, 5, marine())}),
                                  0),
                    DeadAgentError);
}

TEST_CASE("boxed-in agent still has the hold fallback") {
    // Allied unit at the corner, neighbours occupied, nothing in range to attack.
    UnitSpec melee = marine(12, 4, 1, 1, 1);
    GameState s = make_state({unit(Team::allied, 0, {0, 0}, 5, melee),
                              unit(Team::allied, 1, {1, 0}, 5, melee),
                              unit(Team::allied, 2, {0, 1}, 5, melee),
                              unit(Team::enemy, 0, {9, 9}, 5, melee)});
    auto legal = legal_actions(s, 0);
    REQUIRE(legal.size() == 1);
    CHECK(legal[0] == Action::move(MoveDir::left));
    // The fallback resolves as a hold.
    JointAction allied{{0, legal[0]},
                       {1, Action::move(MoveDir::right)},
                       {2, Action::move(MoveDir::down)}};
    GameState next = step(s, allied, {{3, Action::move(MoveDir::left)}}).state;
    CHECK(next.units[0].pos == Vec2i(0, 0));
}

TEST_CASE("movement collisions cancel deterministically") {
    // Two units heading for the same cell: the lower global index wins.
    GameState s = make_state({unit(Team::allied, 0, {2, 2}, 5, marine()),
                              unit(Team::allied, 1, {4, 2}, 5, marine()),
                              unit(Team::enemy, 0, {9, 9}, 5, marine())});
    JointAction allied{{0, Action::move(MoveDir::right)}, {1, Action::move(MoveDir::left)}};
    GameState next = step(s, allied, {{2, Action::move(MoveDir::left)}}).state;
    CHECK(next.units[0].pos == Vec2i(3, 2));
    CHECK(next.units[1].pos == Vec2i(4, 2));

    // A move into a cell occupied at decision time is already illegal.
    GameState t = make_state({unit(Team::allied, 0, {2, 2}, 5, marine()),
                              unit(Team::allied, 1, {3, 2}, 5, marine()),
                              unit(Team::enemy, 0, {9, 9}, 5, marine())});
    JointAction follow{{0, Action::move(MoveDir::right)}, {1, Action::move(MoveDir::right)}};
    CHECK_THROWS_AS(step(t, follow, {{2, Action::move(MoveDir::left)}}), IllegalActionError);
}

TEST_CASE("determinism: identical inputs give identical successors") {
    Scenario sc = small_scenario(3, 3);
    GameState s = spawn(sc, 7);
    PolicyHandle c = make_attack_closest();
    PolicyHandle w = make_attack_weakest();
    JointAction a = greedy_joint_action(*c, s, Team::allied);
    JointAction e = greedy_joint_action(*w, s, Team::enemy);
    GameState n1 = step(s, a, e).state;
    GameState n2 = step(s, a, e).state;
    CHECK(n1 == n2);
    CHECK(state_hash(n1) == state_hash(n2));
}

TEST_CASE("hp never increases across a step") {
    Scenario sc = small_scenario(3, 3);
    PolicyHandle c = make_attack_closest();
    PolicyHandle w = make_attack_weakest();
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        GameState s = spawn(sc, seed);
        while (!s.terminal()) {
            GameState next = step(s, greedy_joint_action(*c, s, Team::allied),
                                  greedy_joint_action(*w, s, Team::enemy))
                                 .state;
            for (std::size_t i = 0; i < s.units.size(); ++i)
                CHECK(next.units[i].hp <= s.units[i].hp);
            s = next;
        }
    }
}

TEST_CASE("feature length is invariant across an episode and dead blocks are zero") {
    Scenario sc = small_scenario(2, 3);
    GameState s = spawn(sc, 3);
    const int expected = feature_dim(s, Team::allied);
    PolicyHandle c = make_attack_closest();
    PolicyHandle w = make_attack_weakest();
    while (!s.terminal()) {
        for (int id : s.living_units(Team::allied))
            CHECK(features(s, id).size() == expected);
        s = step(s, greedy_joint_action(*c, s, Team::allied),
                 greedy_joint_action(*w, s, Team::enemy))
                .state;
    }

    // A dead enemy's block is exactly zero.
    GameState dead = make_state({unit(Team::allied, 0, {2, 2}, 5, marine()),
                                 unit(Team::enemy, 0, {4, 2}, 5, marine()),
                                 unit(Team::enemy, 1, {8, 8}, 0, marine())});
    Eigen::VectorXd f = features(dead, 0);
    // Layout: own block (9), then one block per enemy slot; the dead enemy
    // sorts last in the target list.
    CHECK(f.segment(9 + 9, 9).isZero());
}

TEST_CASE("same-position allies see relative offset zero") {
    GameState s = make_state({unit(Team::allied, 0, {3, 3}, 5, marine()),
                              unit(Team::allied, 1, {3, 3}, 5, marine()),
                              unit(Team::enemy, 0, {8, 8}, 5, marine())});
    Eigen::VectorXd f = features(s, 0);
    // Ally block follows own (9) and the single enemy block (9).
    CHECK(f[9 + 9 + 6] == 0.0);  // relative x
    CHECK(f[9 + 9 + 7] == 0.0);  // relative y
}

TEST_CASE("target order: in-range ascending hp before out-of-range") {
    GameState s = make_state({unit(Team::allied, 0, {4, 4}, 5, marine()),
                              unit(Team::enemy, 0, {5, 4}, 9, marine()),   // in range
                              unit(Team::enemy, 1, {4, 5}, 2, marine()),   // in range, weakest
                              unit(Team::enemy, 2, {9, 9}, 1, marine())})  // out of range
        ;
    auto order = target_order(s, 0);
    CHECK(order == std::vector<int>{2, 1, 3});
}

TEST_CASE("snapshot fairness: damage independent of unit ordering") {
    // Three attackers on one target; overkill flags depend on global order,
    // total damage does not.
    UnitSpec spec = marine(12, 4, 3, 1, 1);
    GameState s = make_state({unit(Team::allied, 0, {2, 2}, 12, spec),
                              unit(Team::allied, 1, {2, 3}, 12, spec),
                              unit(Team::allied, 2, {2, 4}, 12, spec),
                              unit(Team::enemy, 0, {4, 3}, 6, spec)});
    JointAction allied{{0, Action::attack(0)}, {1, Action::attack(0)}, {2, Action::attack(0)}};
    StepResult res = step(s, allied, {{3, Action::attack(0)}});
    CHECK(res.state.units[3].hp == 0);
    int invalid = 0;
    for (const auto& ev : res.attacks)
        if (res.state.units[ev.attacker].team == Team::allied && ev.invalid) ++invalid;
    CHECK(invalid == 1);  // 4+4 >= 6 before the third attack lands
}

TEST_CASE("scenario spawn is seeded and collision-free") {
    Scenario sc = small_scenario(3, 3);
    GameState a = spawn(sc, 42);
    GameState b = spawn(sc, 42);
    GameState c = spawn(sc, 43);
    CHECK(a == b);
    CHECK_FALSE(a == c);
    for (std::size_t i = 0; i < a.units.size(); ++i)
        for (std::size_t j = i + 1; j < a.units.size(); ++j)
            CHECK_FALSE(a.units[i].pos == a.units[j].pos);
}

TEST_CASE("state serialization round-trips") {
    Scenario sc = small_scenario(2, 2);
    GameState s = spawn(sc, 11);
    GameState back = state_from_json(state_to_json(s));
    CHECK(s == back);
    CHECK(state_to_json(s).dump() == state_to_json(back).dump());
}
