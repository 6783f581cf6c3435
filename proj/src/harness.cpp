#include "skirmish/harness.hpp"

#include <json.hpp>

namespace skirmish {

std::string EvalReport::to_json() const {
    nlohmann::json j;
    j["win_rate"] = win_rate;
    j["mean_normalized_reward"] = mean_normalized_reward;
    j["invalid_attack_ratio"] = invalid_attack_ratio;
    j["battles"] = battles;
    j["seed"] = seed;
    j["records"] = nlohmann::json::array();
    for (const auto& r : records) {
        j["records"].push_back({{"seed", r.seed},
                                {"steps", r.steps},
                                {"reward", r.reward},
                                {"normalized_reward", r.normalized_reward},
                                {"win", r.win},
                                {"allied_attacks", r.allied_attacks},
                                {"allied_invalid_attacks", r.allied_invalid_attacks}});
    }
    return j.dump(2);
}

EvalReport evaluate(const PolicyHandle& allied, const PolicyHandle& enemy, const Scenario& scenario,
                    int battles, std::uint64_t seed) {
    if (battles < 1) throw EmptyRequestError("evaluate requires battles >= 1");
    EvalReport report;
    report.battles = battles;
    report.seed = seed;

    int wins = 0;
    double reward_sum = 0.0;
    long attacks = 0, invalid = 0;
    for (int b = 0; b < battles; ++b) {
        BattleRecord rec;
        rec.seed = splitmix64(seed + static_cast<std::uint64_t>(b));
        GameState state = spawn(scenario, rec.seed);
        const GameState initial = state;
        while (!state.terminal()) {
            StepResult res = step(state, greedy_joint_action(*allied, state, Team::allied),
                                  greedy_joint_action(*enemy, state, Team::enemy));
            for (const auto& ev : res.attacks) {
                if (state.units[ev.attacker].team != Team::allied) continue;
                ++rec.allied_attacks;
                rec.allied_invalid_attacks += ev.invalid ? 1 : 0;
            }
            state = std::move(res.state);
        }
        rec.steps = state.step_count;
        rec.reward = terminal_reward(state);
        rec.normalized_reward = normalized_reward(state, initial);
        rec.win = rec.reward > 0;
        wins += rec.win ? 1 : 0;
        reward_sum += rec.normalized_reward;
        attacks += rec.allied_attacks;
        invalid += rec.allied_invalid_attacks;
        report.records.push_back(rec);
    }
    report.win_rate = static_cast<double>(wins) / battles;
    report.mean_normalized_reward = reward_sum / battles;
    report.invalid_attack_ratio = attacks > 0 ? static_cast<double>(invalid) / attacks : 0.0;
    return report;
}

double invalid_attack_ratio(const EvalReport& report) {
    if (report.records.empty()) throw MissingLogsError("report has no per-battle records");
    long attacks = 0, invalid = 0;
    for (const auto& r : report.records) {
        attacks += r.allied_attacks;
        invalid += r.allied_invalid_attacks;
    }
    return attacks > 0 ? static_cast<double>(invalid) / attacks : 0.0;
}

AblationReport run_ablation(const Scenario& scenario, const PolicyHandle& demonstration,
                            const PolicyHandle& opponent, const TrainConfig& cfg,
                            int eval_battles, std::uint64_t eval_seed) {
    AblationReport report;
    auto run_mode = [&](QMode mode) {
        TrainConfig c = cfg;
        c.q_mode = mode;
        TrainResult r = train(scenario, demonstration, opponent, c);
        auto policy = std::make_shared<NetworkPolicy>(r.net);
        EvalReport e = evaluate(policy, opponent, scenario, eval_battles, eval_seed);
        return std::pair(std::move(r), std::move(e));
    };
    report.full = run_mode(QMode::full).second;
    report.demo_only = run_mode(QMode::demo_only).second;
    report.theta_only = run_mode(QMode::theta_only).second;
    return report;
}

CrossValReport cross_validation_run(const Scenario& scenario, const TrainConfig& cfg,
                                    int eval_battles, std::uint64_t eval_seed) {
    CrossValReport report;
    PolicyHandle c = make_attack_closest();
    PolicyHandle w = make_attack_weakest();

    report.baseline_c_vs_w = evaluate(c, w, scenario, eval_battles, eval_seed);
    TrainResult trained_c = train(scenario, c, w, cfg);
    report.trained_c_vs_w = evaluate(std::make_shared<NetworkPolicy>(trained_c.net), w, scenario,
                                     eval_battles, eval_seed);

    report.baseline_w_vs_c = evaluate(w, c, scenario, eval_battles, eval_seed);
    TrainResult trained_w = train(scenario, w, c, cfg);
    report.trained_w_vs_c = evaluate(std::make_shared<NetworkPolicy>(trained_w.net), c, scenario,
                                     eval_battles, eval_seed);
    return report;
}

}  // namespace skirmish
