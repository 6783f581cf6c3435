#pragma once

#include <cstdint>
#include <random>
#include <string>

#include "skirmish/engine.hpp"

namespace skirmish {

/// Deterministic helpers used everywhere randomness is needed, so results do
/// not depend on the standard library's distribution implementations.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline int rand_int(std::mt19937_64& rng, int lo, int hi) {  // inclusive bounds
    return lo + static_cast<int>(rng() % static_cast<std::uint64_t>(hi - lo + 1));
}

inline double rand_unit(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

struct TeamRoster {
    int count = 1;
    UnitSpec spec;
    Vec2i base{0, 0};
    int spawn_radius = 0;  // Chebyshev radius around the base point
};

/// One combat setup: map, rosters, episode cap, evaluation battle count.
struct Scenario {
    std::string name;
    int map_w = 1;
    int map_h = 1;
    int max_steps = 100;
    int eval_battles = 100;
    TeamRoster allied;
    TeamRoster enemy;
};

Scenario load_scenario(const std::string& path);
void save_scenario(const Scenario& s, const std::string& path);

/// Initial state with spawn positions drawn uniformly within each team's
/// spawn radius; collisions are re-drawn from the same seeded stream.
GameState spawn(const Scenario& s, std::uint64_t seed);

}  // namespace skirmish
