#include "skirmish/policy.hpp"

#include <cmath>

#include "skirmish/scenario.hpp"

namespace skirmish {

Action greedy_action(const Policy& policy, const GameState& state, int agent) {
    Eigen::VectorXd p = policy.action_distribution(state, agent);
    auto legal = legal_actions(state, agent);
    Action best = legal.front();
    double best_p = -1.0;
    for (const Action& a : legal) {
        double pa = a.index() < p.size() ? p[a.index()] : 0.0;
        if (pa > best_p) {
            best_p = pa;
            best = a;
        }
    }
    return best;
}

Action sample_action(const Policy& policy, const GameState& state, int agent,
                     std::mt19937_64& rng, double temperature) {
    Eigen::VectorXd p = policy.action_distribution(state, agent);
    auto legal = legal_actions(state, agent);
    Eigen::VectorXd w(legal.size());
    for (std::size_t i = 0; i < legal.size(); ++i) {
        double pa = legal[i].index() < p.size() ? p[legal[i].index()] : 0.0;
        w[static_cast<int>(i)] = std::pow(std::max(pa, 1e-12), 1.0 / temperature);
    }
    double total = w.sum();
    double r = rand_unit(rng) * total;
    double acc = 0.0;
    for (std::size_t i = 0; i < legal.size(); ++i) {
        acc += w[static_cast<int>(i)];
        if (r < acc) return legal[i];
    }
    return legal.back();
}

JointAction greedy_joint_action(const Policy& policy, const GameState& state, Team team) {
    JointAction joint;
    for (int id : state.living_units(team)) joint[id] = greedy_action(policy, state, id);
    return joint;
}

JointAction sampled_joint_action(const Policy& policy, const GameState& state, Team team,
                                 std::mt19937_64& rng, double temperature) {
    JointAction joint;
    for (int id : state.living_units(team)) joint[id] = sample_action(policy, state, id, rng, temperature);
    return joint;
}

}  // namespace skirmish
