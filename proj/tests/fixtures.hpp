#pragma once

#include "skirmish/demonstrators.hpp"
#include "skirmish/scenario.hpp"

namespace skirmish::test {

inline UnitSpec marine(int max_hp = 12, int damage = 4, int range = 3, int velocity = 1,
                       int max_cooldown = 1) {
    return UnitSpec{max_hp, damage, range, velocity, max_cooldown};
}

inline UnitState unit(Team team, int unit_id, Vec2i pos, int hp, const UnitSpec& spec,
                      int cooldown = 0) {
    UnitState u;
    u.spec = spec;
    u.hp = hp;
    u.pos = pos;
    u.cooldown = cooldown;
    u.team = team;
    u.unit_id = unit_id;
    return u;
}

inline GameState make_state(std::vector<UnitState> units, int map_w = 10, int map_h = 10,
                            int max_steps = 60) {
    GameState s;
    s.units = std::move(units);
    s.map_w = map_w;
    s.map_h = map_h;
    s.max_steps = max_steps;
    return s;
}

/// 1v1, both in range, symmetric marines.
inline GameState duel(int hp_a = 5, int hp_e = 5, int damage = 2) {
    UnitSpec spec = marine(10, damage, 3, 1, 1);
    return make_state({unit(Team::allied, 0, {2, 2}, hp_a, spec),
                       unit(Team::enemy, 0, {4, 2}, hp_e, spec)});
}

inline Scenario small_scenario(int allied = 2, int enemy = 2) {
    Scenario s;
    s.name = "test";
    s.map_w = 10;
    s.map_h = 10;
    s.max_steps = 60;
    s.allied = {allied, marine(), {3, 5}, 1};
    s.enemy = {enemy, marine(), {6, 5}, 1};
    return s;
}

}  // namespace skirmish::test
