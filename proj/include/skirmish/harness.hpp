#pragma once

#include <string>

#include "skirmish/learner.hpp"

namespace skirmish {

struct BattleRecord {
    std::uint64_t seed = 0;
    int steps = 0;
    int reward = 0;
    double normalized_reward = 0.0;
    bool win = false;
    long allied_attacks = 0;
    long allied_invalid_attacks = 0;
};

struct EvalReport {
    double win_rate = 0.0;
    double mean_normalized_reward = 0.0;
    double invalid_attack_ratio = 0.0;
    int battles = 0;
    std::uint64_t seed = 0;
    std::vector<BattleRecord> records;

    std::string to_json() const;
};

/// Seeded greedy battles. A win is a strictly positive terminal reward; draws
/// count as losses for W and contribute 0 to the mean normalized reward.
EvalReport evaluate(const PolicyHandle& allied, const PolicyHandle& enemy, const Scenario& scenario,
                    int battles, std::uint64_t seed);

/// Overkill fraction recomputed from the per-battle attack logs.
double invalid_attack_ratio(const EvalReport& report);

struct AblationReport {
    EvalReport full;
    EvalReport demo_only;
    EvalReport theta_only;
};

/// Trains three models differing only in the Q backing and evaluates them
/// identically against the given opponent.
AblationReport run_ablation(const Scenario& scenario, const PolicyHandle& demonstration,
                            const PolicyHandle& opponent, const TrainConfig& cfg,
                            int eval_battles, std::uint64_t eval_seed);

struct CrossValReport {
    EvalReport baseline_c_vs_w;  // demonstrator c evaluated against w, no training
    EvalReport trained_c_vs_w;   // model learned from c, fighting w
    EvalReport baseline_w_vs_c;
    EvalReport trained_w_vs_c;
};

/// The cross-validation protocol: learn from demonstrator c and fight w, and
/// the converse, with demonstrator baselines for both matchups.
CrossValReport cross_validation_run(const Scenario& scenario, const TrainConfig& cfg,
                                    int eval_battles, std::uint64_t eval_seed);

}  // namespace skirmish
