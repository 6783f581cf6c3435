#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <map>
#include <vector>

#include "skirmish/errors.hpp"

namespace skirmish {

using Vec2i = Eigen::Vector2i;

enum class Team { allied, enemy };

inline Team other_team(Team t) { return t == Team::allied ? Team::enemy : Team::allied; }

/// Static unit properties. One archetype per scenario roster entry.
struct UnitSpec {
    int max_hp = 1;
    int damage = 1;
    int weapon_range = 1;  // Chebyshev cells
    int velocity = 1;      // cells per move step
    int max_cooldown = 0;  // steps to wait between attacks

    bool operator==(const UnitSpec&) const = default;
};

struct UnitState {
    UnitSpec spec;
    int hp = 0;
    Vec2i pos{0, 0};
    int cooldown = 0;
    Team team = Team::allied;
    int unit_id = 0;  // stable index within its team

    bool alive() const { return hp > 0; }
    bool operator==(const UnitState& o) const {
        return spec == o.spec && hp == o.hp && pos == o.pos && cooldown == o.cooldown &&
               team == o.team && unit_id == o.unit_id;
    }
};

/// Full joint state. Dead units stay in the roster with hp 0 so indices are
/// stable across an episode.
struct GameState {
    std::vector<UnitState> units;
    int map_w = 1;
    int map_h = 1;
    int step_count = 0;
    int max_steps = 1;

    bool on_map(Vec2i p) const { return p.x() >= 0 && p.x() < map_w && p.y() >= 0 && p.y() < map_h; }

    int living_count(Team t) const;
    int total_hp(Team t) const;
    int roster_count(Team t) const;
    std::vector<int> living_units(Team t) const;
    bool terminal() const;

    bool operator==(const GameState& o) const {
        return units == o.units && map_w == o.map_w && map_h == o.map_h &&
               step_count == o.step_count && max_steps == o.max_steps;
    }
};

enum class MoveDir { left, right, up, down };

inline Vec2i dir_offset(MoveDir d) {
    switch (d) {
        case MoveDir::left: return {-1, 0};
        case MoveDir::right: return {1, 0};
        case MoveDir::up: return {0, -1};
        default: return {0, 1};
    }
}

/// One agent action: a directional move or an attack on a slot of the agent's
/// ordered target list (see target_order).
struct Action {
    enum class Kind { move, attack };
    Kind kind = Kind::move;
    MoveDir dir = MoveDir::left;
    int target_slot = 0;

    static Action move(MoveDir d) { return {Kind::move, d, 0}; }
    static Action attack(int slot) { return {Kind::attack, MoveDir::left, slot}; }

    /// Flat index in the fixed action space: moves 0..3, attacks 4..4+slots-1.
    int index() const { return kind == Kind::move ? static_cast<int>(dir) : 4 + target_slot; }
    static Action from_index(int i) {
        return i < 4 ? move(static_cast<MoveDir>(i)) : attack(i - 4);
    }

    bool operator==(const Action& o) const { return index() == o.index(); }
    bool operator<(const Action& o) const { return index() < o.index(); }
};

/// Per-agent actions for the living units of one team, keyed by global unit index.
using JointAction = std::map<int, Action>;

struct AttackEvent {
    int attacker = 0;  // global unit index
    int target = 0;
    int damage = 0;
    int target_hp_before = 0;  // snapshot hp before any damage this step
    bool invalid = false;      // overkill: target was already dead to earlier-ordered damage
};

struct StepResult {
    GameState state;
    std::vector<AttackEvent> attacks;
};

inline int chebyshev(Vec2i a, Vec2i b) {
    return std::max(std::abs(a.x() - b.x()), std::abs(a.y() - b.y()));
}
inline int manhattan(Vec2i a, Vec2i b) {
    return std::abs(a.x() - b.x()) + std::abs(a.y() - b.y());
}

/// Number of actions in the fixed action space of an agent on `team`:
/// 4 move directions plus one attack slot per initial opposing unit.
int action_dim(const GameState& state, Team team);

/// The agent's ordered attack-target list (global unit indices, fixed length =
/// initial opposing roster): living in-range targets first, then living
/// out-of-range, each ascending by remaining hp (ties by unit id), dead last.
std::vector<int> target_order(const GameState& state, int agent);

/// Legal actions for a living agent: on-map moves into unoccupied cells, and
/// attacks on living in-range slots when cooldown is 0. Never empty: when all
/// of those are ruled out, the blocked move(left) is returned and resolves as
/// a hold inside step().
std::vector<Action> legal_actions(const GameState& state, int agent);

bool is_legal(const GameState& state, int agent, const Action& a);

/// Simultaneous transition. All attacks are computed against the pre-step
/// snapshot, then damage is applied, then moves for surviving non-attackers,
/// then cooldowns update and the step counter advances. Pure: inputs untouched.
StepResult step(const GameState& state, const JointAction& allied, const JointAction& enemy);

/// Allied surviving hp minus enemy surviving hp.
int terminal_reward(const GameState& state);

/// terminal_reward scaled by the allied team's total hp at the initial state.
double normalized_reward(const GameState& state, const GameState& initial);

/// Agent-centric feature vector; see feature_dim for the layout. Fixed length
/// across every reachable state of an episode (dead units yield zero blocks).
Eigen::VectorXd features(const GameState& state, int agent);

/// 9 own properties + 9 per opposing roster slot + 9 per other ally + 10 team stats.
int feature_dim(const GameState& state, Team team);

/// FNV-1a over the dynamic state (hp/pos/cooldown/step); spec fields excluded
/// since they are constant within an episode.
std::uint64_t state_hash(const GameState& state);

}  // namespace skirmish
