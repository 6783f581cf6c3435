#include "skirmish/value.hpp"

#include <cmath>
#include <json.hpp>

namespace skirmish {

double rollout_return(const GameState& state, const JointAction& first, const Policy& policy,
                      const Policy& opponent, double lambda, bool deterministic_actions,
                      std::mt19937_64* rng) {
    if (state.terminal()) throw TerminalStateError("rollout_return on a terminal state");
    const int t0 = state.step_count;
    GameState cur = step(state, first, greedy_joint_action(opponent, state, Team::enemy)).state;
    while (!cur.terminal()) {
        JointAction allied = deterministic_actions
                                 ? greedy_joint_action(policy, cur, Team::allied)
                                 : sampled_joint_action(policy, cur, Team::allied, *rng);
        JointAction enemy = greedy_joint_action(opponent, cur, Team::enemy);
        cur = step(cur, allied, enemy).state;
    }
    int exponent = cur.step_count - 1 - t0;
    return std::pow(lambda, exponent) * terminal_reward(cur);
}

namespace {

std::uint64_t joint_key(const GameState& state, const JointAction& joint) {
    std::uint64_t h = state_hash(state);
    for (const auto& [id, a] : joint) {
        h ^= splitmix64((static_cast<std::uint64_t>(id) << 32) | static_cast<std::uint64_t>(a.index()));
        h *= 1099511628211ULL;
    }
    return h;
}

}  // namespace

double RolloutQ::operator()(const GameState& state, const JointAction& joint) const {
    std::uint64_t key = 0;
    if (cache_enabled_) {
        key = joint_key(state, joint);
        if (auto it = cache_.find(key); it != cache_.end()) return it->second;
    }
    ++rollouts_;
    double v = rollout_return(state, joint, *continuation_, *opponent_, lambda_);
    if (cache_enabled_) cache_[key] = v;
    return v;
}

QFunction q_combined(const RolloutQ& q_theta, const RolloutQ& q_demo) {
    return [&q_theta, &q_demo](const GameState& s, const JointAction& a) {
        return std::max(q_theta(s, a), q_demo(s, a));
    };
}

std::string Lemma1Report::to_json() const {
    nlohmann::json j;
    j["violations"] = violations;
    j["max_violation"] = max_violation;
    j["samples"] = nlohmann::json::array();
    for (const auto& s : samples) {
        j["samples"].push_back({{"state_hash", s.state_hash},
                                {"step", s.step},
                                {"q_demo", s.q_demo},
                                {"q_nash", s.q_nash},
                                {"violation", s.violation}});
    }
    return j.dump(2);
}

Lemma1Report check_lemma1(const Scenario& scenario, const PolicyHandle& demonstration,
                          const PolicyHandle& opponent, int samples, std::uint64_t seed,
                          double lambda, int iterations) {
    if (samples < 1) throw EmptyRequestError("check_lemma1 requires samples >= 1");
    std::mt19937_64 rng(splitmix64(seed));
    Lemma1Report report;

    for (int i = 0; i < static_cast<int>(samples); ++i) {
        // A reachable state: play the demonstration forward a random prefix.
        GameState state = spawn(scenario, rng());
        int prefix = rand_int(rng, 0, scenario.max_steps / 2);
        for (int t = 0; t < prefix && !state.terminal(); ++t) {
            state = step(state, greedy_joint_action(*demonstration, state, Team::allied),
                         greedy_joint_action(*opponent, state, Team::enemy))
                        .state;
        }
        if (state.terminal()) {
            --i;  // redraw; the stream advances so this terminates
            continue;
        }

        // A random legal first joint action.
        JointAction first;
        for (int id : state.living_units(Team::allied)) {
            auto legal = legal_actions(state, id);
            first[id] = legal[static_cast<std::size_t>(rand_int(rng, 0, static_cast<int>(legal.size()) - 1))];
        }

        Lemma1Sample sample;
        sample.state_hash = state_hash(state);
        sample.step = state.step_count;
        sample.q_demo = rollout_return(state, first, *demonstration, *opponent, lambda);

        // Q^N: apply the same first action, then re-solve the equilibrium
        // (inner Q backed by the demonstration continuation) at every step.
        const int t0 = state.step_count;
        GameState cur = step(state, first, greedy_joint_action(*opponent, state, Team::enemy)).state;
        while (!cur.terminal()) {
            RolloutQ inner = make_q_demo(demonstration, opponent, lambda);
            auto profile = best_response_dynamics(cur, inner.as_function(), demonstration, iterations,
                                                  /*early_exit=*/true);
            cur = step(cur, profile.joint, greedy_joint_action(*opponent, cur, Team::enemy)).state;
        }
        sample.q_nash = std::pow(lambda, cur.step_count - 1 - t0) * terminal_reward(cur);

        sample.violation = sample.q_nash < sample.q_demo - 1e-12;
        if (sample.violation) {
            ++report.violations;
            report.max_violation = std::max(report.max_violation, sample.q_demo - sample.q_nash);
        }
        report.samples.push_back(sample);
    }
    return report;
}

}  // namespace skirmish
