#include "skirmish/scenario.hpp"

#include <fstream>
#include <json.hpp>
#include <set>

namespace skirmish {

namespace {

using nlohmann::json;

json spec_to_json(const UnitSpec& s) {
    return {{"max_hp", s.max_hp},
            {"damage", s.damage},
            {"weapon_range", s.weapon_range},
            {"velocity", s.velocity},
            {"max_cooldown", s.max_cooldown}};
}

UnitSpec spec_from_json(const json& j) {
    UnitSpec s;
    s.max_hp = j.at("max_hp");
    s.damage = j.at("damage");
    s.weapon_range = j.at("weapon_range");
    s.velocity = j.at("velocity");
    s.max_cooldown = j.at("max_cooldown");
    if (s.max_hp < 1 || s.damage < 1 || s.weapon_range < 1 || s.velocity < 1 || s.max_cooldown < 0)
        throw ConfigError("unit spec fields out of range");
    return s;
}

json roster_to_json(const TeamRoster& r) {
    return {{"count", r.count},
            {"spec", spec_to_json(r.spec)},
            {"base", {r.base.x(), r.base.y()}},
            {"spawn_radius", r.spawn_radius}};
}

TeamRoster roster_from_json(const json& j) {
    TeamRoster r;
    r.count = j.at("count");
    r.spec = spec_from_json(j.at("spec"));
    r.base = Vec2i(j.at("base").at(0), j.at("base").at(1));
    r.spawn_radius = j.at("spawn_radius");
    if (r.count < 1) throw ConfigError("roster count must be >= 1");
    return r;
}

}  // namespace

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open scenario file: " + path);
    json j;
    in >> j;
    Scenario s;
    s.name = j.at("name");
    s.map_w = j.at("map").at(0);
    s.map_h = j.at("map").at(1);
    s.max_steps = j.at("max_steps");
    s.eval_battles = j.value("eval_battles", 100);
    s.allied = roster_from_json(j.at("allied"));
    s.enemy = roster_from_json(j.at("enemy"));
    if (s.map_w < 1 || s.map_h < 1 || s.max_steps < 1) throw ConfigError("bad map/max_steps");
    auto on_map = [&](Vec2i p) { return p.x() >= 0 && p.x() < s.map_w && p.y() >= 0 && p.y() < s.map_h; };
    if (!on_map(s.allied.base) || !on_map(s.enemy.base)) throw ConfigError("base point off map");
    return s;
}

void save_scenario(const Scenario& s, const std::string& path) {
    json j = {{"name", s.name},
              {"map", {s.map_w, s.map_h}},
              {"max_steps", s.max_steps},
              {"eval_battles", s.eval_battles},
              {"allied", roster_to_json(s.allied)},
              {"enemy", roster_to_json(s.enemy)}};
    std::ofstream out(path);
    out << j.dump(2) << "\n";
}

GameState spawn(const Scenario& s, std::uint64_t seed) {
    GameState g;
    g.map_w = s.map_w;
    g.map_h = s.map_h;
    g.max_steps = s.max_steps;
    std::mt19937_64 rng(splitmix64(seed));
    std::set<std::pair<int, int>> taken;

    auto place = [&](const TeamRoster& r, Team team) {
        for (int i = 0; i < r.count; ++i) {
            Vec2i p;
            do {
                int dx = rand_int(rng, -r.spawn_radius, r.spawn_radius);
                int dy = rand_int(rng, -r.spawn_radius, r.spawn_radius);
                p = Vec2i(std::clamp(r.base.x() + dx, 0, s.map_w - 1),
                          std::clamp(r.base.y() + dy, 0, s.map_h - 1));
            } while (!taken.insert({p.x(), p.y()}).second);
            UnitState u;
            u.spec = r.spec;
            u.hp = r.spec.max_hp;
            u.pos = p;
            u.cooldown = 0;
            u.team = team;
            u.unit_id = i;
            g.units.push_back(u);
        }
    };
    place(s.allied, Team::allied);
    place(s.enemy, Team::enemy);
    return g;
}

}  // namespace skirmish
