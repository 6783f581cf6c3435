#pragma once

#include <optional>
#include <string>

#include "skirmish/demonstrators.hpp"
#include "skirmish/game_theory.hpp"
#include "skirmish/network.hpp"
#include "skirmish/scenario.hpp"
#include "skirmish/value.hpp"

namespace skirmish {

/// Min-shifted, sum-normalized response vector: the supervision target built
/// from the per-action values at the equilibrium. All-equal responses (a 0/0)
/// degenerate to the uniform distribution. Invariant under c*Q + b, c > 0.
Eigen::VectorXd objective_policy(const Eigen::VectorXd& responses);

bool scale_invariance_check(const Eigen::VectorXd& responses, double c, double tol = 1e-9);

/// One per-agent supervision sample: features, a target distribution over the
/// full action space (zero on illegal actions) and the legal index list.
struct PolicySample {
    Eigen::VectorXd features;
    Eigen::VectorXd target;
    std::vector<int> legal;
};

/// -sum_g sum_a target(a) * log p_theta(a|g,s) over the masked softmax;
/// zero-target terms contribute nothing, log is clamped at 1e-12.
double kl_loss(const PolicyNetwork& net, const std::vector<PolicySample>& batch);

/// Analytic ascent gradient of sum_g sum_a target(a) * log p_theta(a|g,s).
PolicyNetwork::Gradients policy_gradient(const PolicyNetwork& net,
                                         const std::vector<PolicySample>& batch);

enum class QMode { full, demo_only, theta_only };

struct TrainConfig {
    double learning_rate = 1e-3;
    double momentum = 0.0;
    double clip_norm = 5.0;  // global gradient l2 cap per update
    long total_env_steps = 10000;
    double early_stage_fraction = 0.5;  // PNE-driven exploration before, sampled after
    double lambda = 1.0;
    int brd_iterations = 10;
    bool brd_early_exit = true;
    // 0: one mean-gradient update over each episode's samples. > 0: after each
    // episode, draw `updates_per_episode` minibatches of this size from the
    // accumulated sample store (capped at sample_capacity, oldest dropped) —
    // one-visit online updates underfit badly, see updates_per_episode.
    int minibatch_states = 0;
    int updates_per_episode = 16;
    int sample_capacity = 100000;
    std::uint64_t seed = 0;
    double temperature = 1.0;
    QMode q_mode = QMode::full;
    std::vector<int> hidden = {256, 128, 128};
    bool normalization = true;

    void validate() const;
};

TrainConfig load_train_config(const std::string& path);
void save_train_config(const TrainConfig& cfg, const std::string& path);

struct EpisodeLog {
    int episode = 0;
    long env_steps = 0;
    bool early_stage = true;
    bool win = false;
    int reward = 0;
    double normalized_reward = 0.0;
    double mean_loss = 0.0;
    bool completed = true;  // false when the step budget cut the episode short
};

struct TrainResult {
    PolicyNetwork net;
    std::vector<EpisodeLog> log;
    bool diverged = false;  // non-finite loss; net holds the last finite parameters
};

void save_train_log(const std::vector<EpisodeLog>& log, const std::string& path);

/// The full training loop: per decision step, build Q (per q_mode), run the
/// equilibrium search seeded by the demonstration, convert response profiles
/// into objective policies and ascend the KL objective; the environment is
/// advanced by the equilibrium action in the early stage and by sampled
/// network actions afterwards.
TrainResult train(const Scenario& scenario, const PolicyHandle& demonstration,
                  const PolicyHandle& opponent, const TrainConfig& cfg);

struct ImitationConfig {
    double learning_rate = 0.02;  // linearly decayed to a tenth over the epochs
    double momentum = 0.0;
    double clip_norm = 5.0;  // global gradient l2 cap per update
    int epochs = 150;
    int batch_size = 32;
    double holdout_fraction = 0.1;
    std::uint64_t seed = 0;
    std::vector<int> hidden = {256, 128, 128};
    bool normalization = true;
};

struct ImitationResult {
    PolicyNetwork net;
    double final_loss = 0.0;
    double holdout_agreement = 0.0;  // argmax match rate on held-out records
};

/// Behavioral cloning of a demonstration: minimizes the summed cross-entropy
/// of the recorded actions under the masked softmax policy.
ImitationResult fit_imitation(const Demonstration& demo, const ImitationConfig& cfg);

}  // namespace skirmish
