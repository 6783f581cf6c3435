#include "skirmish/serialize.hpp"

namespace skirmish {

using nlohmann::json;

json state_to_json(const GameState& state) {
    json units = json::array();
    for (const auto& u : state.units) {
        units.push_back({{"max_hp", u.spec.max_hp},
                         {"damage", u.spec.damage},
                         {"weapon_range", u.spec.weapon_range},
                         {"velocity", u.spec.velocity},
                         {"max_cooldown", u.spec.max_cooldown},
                         {"hp", u.hp},
                         {"pos", {u.pos.x(), u.pos.y()}},
                         {"cooldown", u.cooldown},
                         {"team", u.team == Team::allied ? 0 : 1},
                         {"unit_id", u.unit_id}});
    }
    return {{"units", units},
            {"map", {state.map_w, state.map_h}},
            {"step", state.step_count},
            {"max_steps", state.max_steps}};
}

GameState state_from_json(const json& j) {
    GameState s;
    s.map_w = j.at("map").at(0);
    s.map_h = j.at("map").at(1);
    s.step_count = j.at("step");
    s.max_steps = j.at("max_steps");
    for (const auto& ju : j.at("units")) {
        UnitState u;
        u.spec.max_hp = ju.at("max_hp");
        u.spec.damage = ju.at("damage");
        u.spec.weapon_range = ju.at("weapon_range");
        u.spec.velocity = ju.at("velocity");
        u.spec.max_cooldown = ju.at("max_cooldown");
        u.hp = ju.at("hp");
        u.pos = Vec2i(ju.at("pos").at(0), ju.at("pos").at(1));
        u.cooldown = ju.at("cooldown");
        u.team = ju.at("team") == 0 ? Team::allied : Team::enemy;
        u.unit_id = ju.at("unit_id");
        s.units.push_back(u);
    }
    return s;
}

std::string action_code(const Action& a) {
    if (a.kind == Action::Kind::move) return "m:" + std::to_string(static_cast<int>(a.dir));
    return "a:" + std::to_string(a.target_slot);
}

Action action_from_code(const std::string& code) {
    if (code.size() < 3 || code[1] != ':') throw ConfigError("bad action code: " + code);
    int v = std::stoi(code.substr(2));
    if (code[0] == 'm') return Action::move(static_cast<MoveDir>(v));
    if (code[0] == 'a') return Action::attack(v);
    throw ConfigError("bad action code: " + code);
}

}  // namespace skirmish
