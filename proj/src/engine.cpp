#include "skirmish/engine.hpp"

#include <algorithm>
#include <set>

namespace skirmish {

int GameState::living_count(Team t) const {
    int n = 0;
    for (const auto& u : units) n += (u.team == t && u.alive()) ? 1 : 0;
    return n;
}

int GameState::total_hp(Team t) const {
    int s = 0;
    for (const auto& u : units)
        if (u.team == t) s += u.hp;
    return s;
}

int GameState::roster_count(Team t) const {
    int n = 0;
    for (const auto& u : units) n += (u.team == t) ? 1 : 0;
    return n;
}

std::vector<int> GameState::living_units(Team t) const {
    std::vector<int> ids;
    for (int i = 0; i < static_cast<int>(units.size()); ++i)
        if (units[i].team == t && units[i].alive()) ids.push_back(i);
    return ids;
}

bool GameState::terminal() const {
    return living_count(Team::allied) == 0 || living_count(Team::enemy) == 0 ||
           step_count >= max_steps;
}

int action_dim(const GameState& state, Team team) {
    return 4 + state.roster_count(other_team(team));
}

std::vector<int> target_order(const GameState& state, int agent) {
    const UnitState& self = state.units.at(agent);
    Team opp = other_team(self.team);
    std::vector<int> in_range, out_range, dead;
    for (int i = 0; i < static_cast<int>(state.units.size()); ++i) {
        const auto& u = state.units[i];
        if (u.team != opp) continue;
        if (!u.alive())
            dead.push_back(i);
        else if (chebyshev(self.pos, u.pos) <= self.spec.weapon_range)
            in_range.push_back(i);
        else
            out_range.push_back(i);
    }
    auto by_hp = [&](int a, int b) {
        const auto& ua = state.units[a];
        const auto& ub = state.units[b];
        if (ua.hp != ub.hp) return ua.hp < ub.hp;
        return ua.unit_id < ub.unit_id;
    };
    std::sort(in_range.begin(), in_range.end(), by_hp);
    std::sort(out_range.begin(), out_range.end(), by_hp);
    std::vector<int> order = in_range;
    order.insert(order.end(), out_range.begin(), out_range.end());
    order.insert(order.end(), dead.begin(), dead.end());
    return order;
}

namespace {

bool cell_occupied(const GameState& state, Vec2i p) {
    for (const auto& u : state.units)
        if (u.alive() && u.pos == p) return true;
    return false;
}

int in_range_living_count(const GameState& state, int agent) {
    const UnitState& self = state.units[agent];
    int n = 0;
    for (const auto& u : state.units)
        if (u.team == other_team(self.team) && u.alive() &&
            chebyshev(self.pos, u.pos) <= self.spec.weapon_range)
            ++n;
    return n;
}

}  // namespace

std::vector<Action> legal_actions(const GameState& state, int agent) {
    const UnitState& self = state.units.at(agent);
    if (!self.alive()) throw DeadAgentError(agent);

    std::vector<Action> out;
    for (int d = 0; d < 4; ++d) {
        Vec2i dest = self.pos + dir_offset(static_cast<MoveDir>(d)) * self.spec.velocity;
        if (state.on_map(dest) && !cell_occupied(state, dest))
            out.push_back(Action::move(static_cast<MoveDir>(d)));
    }
    if (self.cooldown == 0) {
        int attackable = in_range_living_count(state, agent);
        for (int slot = 0; slot < attackable; ++slot) out.push_back(Action::attack(slot));
    }
    if (out.empty()) out.push_back(Action::move(MoveDir::left));  // hold fallback
    return out;
}

bool is_legal(const GameState& state, int agent, const Action& a) {
    auto legal = legal_actions(state, agent);
    return std::find(legal.begin(), legal.end(), a) != legal.end();
}

namespace {

void validate_joint(const GameState& state, const JointAction& joint, Team team) {
    auto living = state.living_units(team);
    if (joint.size() != living.size())
        throw IllegalActionError("joint action does not cover exactly the living agents");
    for (int id : living)
        if (!joint.contains(id))
            throw IllegalActionError("missing action for agent " + std::to_string(id));
    for (const auto& [id, a] : joint) {
        if (state.units.at(id).team != team)
            throw IllegalActionError("agent " + std::to_string(id) + " is not on the acting team");
        if (!is_legal(state, id, a))
            throw IllegalActionError("illegal action for agent " + std::to_string(id));
    }
}

}  // namespace

StepResult step(const GameState& state, const JointAction& allied, const JointAction& enemy) {
    if (state.terminal()) throw AlreadyTerminalError();
    validate_joint(state, allied, Team::allied);
    validate_joint(state, enemy, Team::enemy);

    GameState next = state;

    // Resolve attacks against the pre-step snapshot, in global unit order.
    std::vector<std::pair<int, Action>> acts;
    for (const auto& [id, a] : allied) acts.emplace_back(id, a);
    for (const auto& [id, a] : enemy) acts.emplace_back(id, a);
    std::sort(acts.begin(), acts.end(), [](const auto& a, const auto& b) { return a.first < b.first; });

    std::vector<AttackEvent> events;
    std::vector<int> damage_so_far(state.units.size(), 0);
    std::vector<bool> attacked(state.units.size(), false);
    for (const auto& [id, a] : acts) {
        if (a.kind != Action::Kind::attack) continue;
        int target = target_order(state, id).at(a.target_slot);
        AttackEvent ev;
        ev.attacker = id;
        ev.target = target;
        ev.damage = state.units[id].spec.damage;
        ev.target_hp_before = state.units[target].hp;
        ev.invalid = ev.target_hp_before <= damage_so_far[target];
        damage_so_far[target] += ev.damage;
        attacked[id] = true;
        events.push_back(ev);
    }
    for (std::size_t i = 0; i < next.units.size(); ++i)
        next.units[i].hp = std::max(0, next.units[i].hp - damage_so_far[i]);

    // Moves for surviving non-attackers. Occupancy is judged against the
    // post-damage, pre-move positions; contested destinations go to the
    // lowest-index mover, everyone else holds.
    std::set<std::pair<int, int>> claimed;
    for (const auto& [id, a] : acts) {
        if (a.kind != Action::Kind::move) continue;
        UnitState& u = next.units[id];
        if (!u.alive()) continue;
        Vec2i dest = u.pos + dir_offset(a.dir) * u.spec.velocity;
        if (!next.on_map(dest)) continue;
        if (cell_occupied(next, dest)) continue;
        if (!claimed.insert({dest.x(), dest.y()}).second) continue;
        u.pos = dest;
    }

    for (std::size_t i = 0; i < next.units.size(); ++i) {
        UnitState& u = next.units[i];
        if (attacked[i])
            u.cooldown = u.spec.max_cooldown;
        else
            u.cooldown = std::max(0, u.cooldown - 1);
    }

    next.step_count += 1;
    return {std::move(next), std::move(events)};
}

int terminal_reward(const GameState& state) {
    if (!state.terminal()) throw NotTerminalError();
    return state.total_hp(Team::allied) - state.total_hp(Team::enemy);
}

double normalized_reward(const GameState& state, const GameState& initial) {
    return static_cast<double>(terminal_reward(state)) /
           static_cast<double>(initial.total_hp(Team::allied));
}

namespace {

constexpr int kUnitFeatures = 9;

void write_unit_block(Eigen::VectorXd& f, int& at, const UnitState& u, Vec2i origin, bool absolute) {
    if (!u.alive()) {
        at += kUnitFeatures;  // zero block
        return;
    }
    const UnitSpec& s = u.spec;
    f[at++] = s.max_hp;
    f[at++] = s.velocity;
    f[at++] = s.damage;
    f[at++] = s.max_cooldown;
    f[at++] = static_cast<double>(s.damage) / (s.max_cooldown + 1);  // damage per frame
    f[at++] = u.hp;
    f[at++] = absolute ? u.pos.x() : u.pos.x() - origin.x();
    f[at++] = absolute ? u.pos.y() : u.pos.y() - origin.y();
    f[at++] = u.cooldown;
}

void write_team_stats(Eigen::VectorXd& f, int& at, const GameState& state, Team t, Vec2i origin) {
    int n = 0, lo = 0, hi = 0, sum = 0;
    double cx = 0, cy = 0;
    for (const auto& u : state.units) {
        if (u.team != t || !u.alive()) continue;
        if (n == 0) {
            lo = hi = u.hp;
        } else {
            lo = std::min(lo, u.hp);
            hi = std::max(hi, u.hp);
        }
        sum += u.hp;
        cx += u.pos.x();
        cy += u.pos.y();
        ++n;
    }
    if (n == 0) {
        at += 5;  // zero block
        return;
    }
    f[at++] = static_cast<double>(sum) / n;
    f[at++] = lo;
    f[at++] = hi;
    f[at++] = cx / n - origin.x();
    f[at++] = cy / n - origin.y();
}

}  // namespace

int feature_dim(const GameState& state, Team team) {
    int enemies = state.roster_count(other_team(team));
    int allies = state.roster_count(team) - 1;
    return kUnitFeatures * (1 + enemies + allies) + 10;
}

Eigen::VectorXd features(const GameState& state, int agent) {
    const UnitState& self = state.units.at(agent);
    if (!self.alive()) throw DeadAgentError(agent);

    Eigen::VectorXd f = Eigen::VectorXd::Zero(feature_dim(state, self.team));
    int at = 0;
    write_unit_block(f, at, self, self.pos, /*absolute=*/true);

    for (int idx : target_order(state, agent))
        write_unit_block(f, at, state.units[idx], self.pos, false);

    std::vector<int> allies;
    for (int i = 0; i < static_cast<int>(state.units.size()); ++i)
        if (i != agent && state.units[i].team == self.team) allies.push_back(i);
    std::stable_sort(allies.begin(), allies.end(), [&](int a, int b) {
        bool la = state.units[a].alive(), lb = state.units[b].alive();
        if (la != lb) return la;  // dead allies sort last
        return chebyshev(self.pos, state.units[a].pos) < chebyshev(self.pos, state.units[b].pos);
    });
    for (int idx : allies) write_unit_block(f, at, state.units[idx], self.pos, false);

    write_team_stats(f, at, state, self.team, self.pos);
    write_team_stats(f, at, state, other_team(self.team), self.pos);
    return f;
}

std::uint64_t state_hash(const GameState& state) {
    std::uint64_t h = 1469598103934665603ULL;
    auto mix = [&h](std::uint64_t v) {
        h ^= v;
        h *= 1099511628211ULL;
    };
    mix(static_cast<std::uint64_t>(state.step_count));
    for (const auto& u : state.units) {
        mix(static_cast<std::uint64_t>(u.hp));
        mix(static_cast<std::uint64_t>(u.pos.x() + 1000));
        mix(static_cast<std::uint64_t>(u.pos.y() + 1000));
        mix(static_cast<std::uint64_t>(u.cooldown));
    }
    return h;
}

}  // namespace skirmish
