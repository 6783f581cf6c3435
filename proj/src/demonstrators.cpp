#include "skirmish/demonstrators.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "skirmish/serialize.hpp"

namespace skirmish {

namespace {

int slot_of(const GameState& state, int agent, int target) {
    auto order = target_order(state, agent);
    auto it = std::find(order.begin(), order.end(), target);
    return static_cast<int>(it - order.begin());
}

int closest_living_enemy(const GameState& state, int agent) {
    const UnitState& self = state.units[agent];
    int best = -1;
    for (int i = 0; i < static_cast<int>(state.units.size()); ++i) {
        const auto& u = state.units[i];
        if (u.team != other_team(self.team) || !u.alive()) continue;
        if (best < 0) {
            best = i;
            continue;
        }
        const auto& b = state.units[best];
        auto key = [&](const UnitState& e) {
            return std::tuple(chebyshev(self.pos, e.pos), manhattan(self.pos, e.pos), e.unit_id);
        };
        if (key(u) < key(b)) best = i;
    }
    return best;
}

/// Legal move minimizing the distance pair (Chebyshev, Manhattan) to the
/// target; Chebyshev alone plateaus under 4-directional movement when both
/// axis offsets are equal. Falls back to the least-bad legal move when no
/// strict decrease exists, and to hold when boxed in.
Action move_toward(const GameState& state, int agent, Vec2i goal) {
    const UnitState& self = state.units[agent];
    auto legal = legal_actions(state, agent);
    Action best = legal.front();
    auto pair_at = [&](Vec2i p) { return std::pair(chebyshev(p, goal), manhattan(p, goal)); };
    auto best_pair = std::pair(INT32_MAX, INT32_MAX);
    for (const Action& a : legal) {
        if (a.kind != Action::Kind::move) continue;
        Vec2i dest = self.pos + dir_offset(a.dir) * self.spec.velocity;
        if (!state.on_map(dest)) continue;  // the hold fallback
        auto p = pair_at(dest);
        if (p < best_pair) {
            best_pair = p;
            best = a;
        }
    }
    return best;
}

Action heuristic_action(const GameState& state, int agent, bool weakest) {
    const UnitState& self = state.units.at(agent);
    if (!self.alive()) throw DeadAgentError(agent);

    if (self.cooldown == 0) {
        int best = -1;
        for (int i = 0; i < static_cast<int>(state.units.size()); ++i) {
            const auto& u = state.units[i];
            if (u.team != other_team(self.team) || !u.alive()) continue;
            if (chebyshev(self.pos, u.pos) > self.spec.weapon_range) continue;
            if (best < 0) {
                best = i;
                continue;
            }
            const auto& b = state.units[best];
            auto key = [&](const UnitState& e) {
                int d = chebyshev(self.pos, e.pos);
                return weakest ? std::tuple(e.hp, d, e.unit_id) : std::tuple(d, e.hp, e.unit_id);
            };
            if (key(u) < key(b)) best = i;
        }
        if (best >= 0) return Action::attack(slot_of(state, agent, best));
    }
    int target = closest_living_enemy(state, agent);
    return move_toward(state, agent, state.units[target].pos);
}

}  // namespace

Action attack_closest(const GameState& state, int agent) { return heuristic_action(state, agent, false); }

Action attack_weakest(const GameState& state, int agent) { return heuristic_action(state, agent, true); }

Eigen::VectorXd HeuristicPolicy::action_distribution(const GameState& state, int agent) const {
    Eigen::VectorXd p = Eigen::VectorXd::Zero(action_dim(state, state.units.at(agent).team));
    p[fn_(state, agent).index()] = 1.0;
    return p;
}

Demonstration record_demonstration(const Scenario& scenario, const PolicyHandle& policy,
                                   const PolicyHandle& opponent, int episodes, std::uint64_t seed) {
    if (episodes < 1) throw EmptyRequestError("record_demonstration requires episodes >= 1");
    Demonstration demo;
    for (int ep = 0; ep < episodes; ++ep) {
        GameState state = spawn(scenario, splitmix64(seed + static_cast<std::uint64_t>(ep)));
        while (!state.terminal()) {
            JointAction allied = greedy_joint_action(*policy, state, Team::allied);
            JointAction enemy = greedy_joint_action(*opponent, state, Team::enemy);
            DemoRecord rec;
            rec.episode = ep;
            rec.step = state.step_count;
            rec.state = state;
            rec.actions.assign(allied.begin(), allied.end());
            demo.records.push_back(std::move(rec));
            state = step(state, allied, enemy).state;
        }
    }
    return demo;
}

void save_demonstration(const Demonstration& demo, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot open for write: " + path);
    for (const auto& rec : demo.records) {
        out << rec.episode << ' ' << rec.step << ' ' << state_hash(rec.state) << '\t'
            << state_to_json(rec.state).dump() << '\t';
        bool first = true;
        for (const auto& [id, a] : rec.actions) {
            if (!first) out << ' ';
            first = false;
            out << id << '=' << action_code(a);
        }
        out << '\n';
    }
}

Demonstration load_demonstration(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open demonstration file: " + path);
    Demonstration demo;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream head(line);
        DemoRecord rec;
        std::uint64_t recorded_hash;
        head >> rec.episode >> rec.step >> recorded_hash;
        auto tab1 = line.find('\t');
        auto tab2 = line.find('\t', tab1 + 1);
        rec.state = state_from_json(nlohmann::json::parse(line.substr(tab1 + 1, tab2 - tab1 - 1)));
        if (state_hash(rec.state) != recorded_hash)
            throw ConfigError("demonstration record hash mismatch");
        std::istringstream acts(line.substr(tab2 + 1));
        std::string tok;
        while (acts >> tok) {
            auto eq = tok.find('=');
            rec.actions.emplace_back(std::stoi(tok.substr(0, eq)), action_from_code(tok.substr(eq + 1)));
        }
        demo.records.push_back(std::move(rec));
    }
    return demo;
}

}  // namespace skirmish
