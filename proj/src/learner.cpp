#include "skirmish/learner.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <json.hpp>
#include <numeric>

namespace skirmish {

Eigen::VectorXd objective_policy(const Eigen::VectorXd& responses) {
    const int n = static_cast<int>(responses.size());
    double lo = responses.minCoeff();
    double denom = responses.sum() - n * lo;
    if (denom <= 0.0) return Eigen::VectorXd::Constant(n, 1.0 / n);  // all responses equal
    return (responses.array() - lo) / denom;
}

bool scale_invariance_check(const Eigen::VectorXd& responses, double c, double tol) {
    if (c <= 0.0) throw ConfigError("scale factor must be positive");
    Eigen::VectorXd a = objective_policy(responses);
    Eigen::VectorXd b = objective_policy(c * responses);
    return (a - b).cwiseAbs().maxCoeff() <= tol;
}

namespace {

/// d/dlogits of sum_a target(a) * log p_masked(a): target - p_masked on legal
/// entries, zero elsewhere. Assumes the target sums to 1 over legal actions.
Eigen::VectorXd logit_gradient(const PolicyNetwork& net, const PolicySample& s) {
    Eigen::VectorXd p = net.masked_forward(s.features, s.legal);
    Eigen::VectorXd d = Eigen::VectorXd::Zero(p.size());
    for (int i : s.legal) d[i] = s.target[i] - p[i];
    return d;
}

}  // namespace

double kl_loss(const PolicyNetwork& net, const std::vector<PolicySample>& batch) {
    double loss = 0.0;
    for (const auto& s : batch) {
        Eigen::VectorXd p = net.masked_forward(s.features, s.legal);
        for (int i : s.legal) {
            if (s.target[i] == 0.0) continue;  // 0 * log convention
            loss -= s.target[i] * std::log(std::max(p[i], 1e-12));
        }
    }
    if (!std::isfinite(loss)) throw NonFiniteLossError("kl_loss is not finite");
    return loss;
}

PolicyNetwork::Gradients policy_gradient(const PolicyNetwork& net,
                                         const std::vector<PolicySample>& batch) {
    auto grads = net.make_gradients();
    for (const auto& s : batch) net.accumulate_gradient(s.features, logit_gradient(net, s), grads);
    if (!grads.finite()) throw NonFiniteLossError("policy gradient is not finite");
    return grads;
}

void TrainConfig::validate() const {
    if (learning_rate <= 0 || lambda <= 0 || brd_iterations < 1 || temperature <= 0)
        throw ConfigError("train config fields must be positive");
    if (total_env_steps < 0 || minibatch_states < 0) throw ConfigError("negative budget");
    if (clip_norm < 0) throw ConfigError("clip_norm must be >= 0 (0 disables clipping)");
    if (updates_per_episode < 1 || sample_capacity < 1)
        throw ConfigError("updates_per_episode and sample_capacity must be positive");
    if (early_stage_fraction < 0.0 || early_stage_fraction > 1.0)
        throw ConfigError("early_stage_fraction must be in [0,1]");
    if (hidden.size() != 3) throw ConfigError("expected 3 hidden widths");
}

namespace {

using nlohmann::json;

QMode qmode_from_string(const std::string& s) {
    if (s == "full") return QMode::full;
    if (s == "demo_only") return QMode::demo_only;
    if (s == "theta_only") return QMode::theta_only;
    throw ConfigError("unknown q_mode: " + s);
}

std::string qmode_to_string(QMode m) {
    switch (m) {
        case QMode::full: return "full";
        case QMode::demo_only: return "demo_only";
        default: return "theta_only";
    }
}

}  // namespace

TrainConfig load_train_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    json j;
    in >> j;
    TrainConfig c;
    c.learning_rate = j.value("learning_rate", c.learning_rate);
    c.momentum = j.value("momentum", c.momentum);
    c.clip_norm = j.value("clip_norm", c.clip_norm);
    c.total_env_steps = j.value("total_env_steps", c.total_env_steps);
    c.early_stage_fraction = j.value("early_stage_fraction", c.early_stage_fraction);
    c.lambda = j.value("lambda", c.lambda);
    c.brd_iterations = j.value("brd_iterations", c.brd_iterations);
    c.brd_early_exit = j.value("brd_early_exit", c.brd_early_exit);
    c.minibatch_states = j.value("minibatch_states", c.minibatch_states);
    c.updates_per_episode = j.value("updates_per_episode", c.updates_per_episode);
    c.sample_capacity = j.value("sample_capacity", c.sample_capacity);
    c.seed = j.value("seed", c.seed);
    c.temperature = j.value("temperature", c.temperature);
    if (j.contains("q_mode")) c.q_mode = qmode_from_string(j.at("q_mode"));
    if (j.contains("hidden")) c.hidden = j.at("hidden").get<std::vector<int>>();
    c.normalization = j.value("normalization", c.normalization);
    c.validate();
    return c;
}

void save_train_config(const TrainConfig& cfg, const std::string& path) {
    json j = {{"learning_rate", cfg.learning_rate},
              {"momentum", cfg.momentum},
              {"clip_norm", cfg.clip_norm},
              {"total_env_steps", cfg.total_env_steps},
              {"early_stage_fraction", cfg.early_stage_fraction},
              {"lambda", cfg.lambda},
              {"brd_iterations", cfg.brd_iterations},
              {"brd_early_exit", cfg.brd_early_exit},
              {"minibatch_states", cfg.minibatch_states},
              {"updates_per_episode", cfg.updates_per_episode},
              {"sample_capacity", cfg.sample_capacity},
              {"seed", cfg.seed},
              {"temperature", cfg.temperature},
              {"q_mode", qmode_to_string(cfg.q_mode)},
              {"hidden", cfg.hidden},
              {"normalization", cfg.normalization}};
    std::ofstream out(path);
    out << j.dump(2) << "\n";
}

void save_train_log(const std::vector<EpisodeLog>& log, const std::string& path) {
    std::ofstream out(path);
    out << "episode,steps,stage,win,reward,normalized_reward,mean_loss\n";
    for (const auto& e : log)
        out << e.episode << ',' << e.env_steps << ',' << (e.early_stage ? "pne" : "dpn") << ','
            << (e.win ? 1 : 0) << ',' << e.reward << ',' << e.normalized_reward << ',' << e.mean_loss
            << '\n';
}

TrainResult train(const Scenario& scenario, const PolicyHandle& demonstration,
                  const PolicyHandle& opponent, const TrainConfig& cfg) {
    cfg.validate();

    GameState probe = spawn(scenario, 0);
    NetConfig net_cfg;
    net_cfg.input_dim = feature_dim(probe, Team::allied);
    net_cfg.hidden = cfg.hidden;
    net_cfg.action_dim = action_dim(probe, Team::allied);
    net_cfg.normalization = cfg.normalization;
    net_cfg.init_seed = cfg.seed;

    TrainResult result{PolicyNetwork(net_cfg), {}, false};
    PolicyNetwork& net = result.net;
    auto learned = std::make_shared<NetworkPolicy>(net);

    std::mt19937_64 rng(splitmix64(cfg.seed ^ 0x74726e));
    const long early_cutoff = static_cast<long>(cfg.early_stage_fraction * cfg.total_env_steps);

    auto momentum_buf = net.make_gradients();
    Eigen::VectorXd last_good = net.parameters();
    std::vector<PolicySample> store;  // accumulated supervision pairs, FIFO-capped
    std::size_t store_head = 0;
    long env_steps = 0;

    auto keep = [&](PolicySample s) {
        if (static_cast<int>(store.size()) < cfg.sample_capacity) {
            store.push_back(std::move(s));
        } else {
            store[store_head] = std::move(s);
            store_head = (store_head + 1) % store.size();
        }
    };

    // Linear decay to a tenth of the initial rate over the step budget.
    auto current_lr = [&]() {
        double frac = cfg.total_env_steps > 0
                          ? std::min(1.0, static_cast<double>(env_steps) / cfg.total_env_steps)
                          : 1.0;
        return cfg.learning_rate * (1.0 - 0.9 * frac);
    };

    auto apply = [&](const std::vector<PolicySample>& batch) {
        auto grads = policy_gradient(net, batch);
        grads.scale(1.0 / static_cast<double>(batch.size()));
        if (cfg.clip_norm > 0.0) grads.clip(cfg.clip_norm);
        if (cfg.momentum > 0.0) {
            momentum_buf.scale(cfg.momentum);
            momentum_buf.axpy(1.0, grads);
            net.apply_update(momentum_buf, current_lr());
        } else {
            net.apply_update(grads, current_lr());
        }
        if (!net.parameters().allFinite()) {
            net.set_parameters(last_good);
            return false;
        }
        last_good = net.parameters();
        return true;
    };

    int episode = 0;
    while (env_steps < cfg.total_env_steps && !result.diverged) {
        GameState state = spawn(scenario, splitmix64(cfg.seed + 0x9e37 * (episode + 1)));
        const GameState initial = state;
        double loss_sum = 0.0;
        long decisions = 0;
        bool early = true;
        std::vector<PolicySample> episode_samples;

        while (!state.terminal() && env_steps < cfg.total_env_steps && !result.diverged) {
            early = env_steps < early_cutoff;

            RolloutQ q_demo = make_q_demo(demonstration, opponent, cfg.lambda);
            RolloutQ q_theta = make_q_theta(learned, opponent, cfg.lambda);
            QFunction q;
            switch (cfg.q_mode) {
                case QMode::full: q = q_combined(q_theta, q_demo); break;
                case QMode::demo_only: q = q_demo.as_function(); break;
                case QMode::theta_only: q = q_theta.as_function(); break;
            }

            auto profile = best_response_dynamics(state, q, demonstration, cfg.brd_iterations,
                                                  cfg.brd_early_exit);

            std::vector<PolicySample> batch;
            for (std::size_t gi = 0; gi < profile.agents.size(); ++gi) {
                PolicySample s;
                s.features = features(state, profile.agents[gi]);
                Eigen::VectorXd p_obj = objective_policy(profile.responses[gi]);
                s.target = Eigen::VectorXd::Zero(net_cfg.action_dim);
                for (std::size_t ai = 0; ai < profile.actions[gi].size(); ++ai) {
                    s.target[profile.actions[gi][ai].index()] = p_obj[static_cast<int>(ai)];
                    s.legal.push_back(profile.actions[gi][ai].index());
                }
                net.observe(s.features);
                batch.push_back(std::move(s));
            }

            try {
                loss_sum += kl_loss(net, batch);
            } catch (const NonFiniteLossError&) {
                net.set_parameters(last_good);
                result.diverged = true;
                break;
            }
            for (auto& s : batch) episode_samples.push_back(std::move(s));
            ++decisions;

            JointAction allied = early ? profile.joint
                                       : sampled_joint_action(*learned, state, Team::allied, rng,
                                                              cfg.temperature);
            JointAction enemy = greedy_joint_action(*opponent, state, Team::enemy);
            state = step(state, allied, enemy).state;
            ++env_steps;
        }

        if (!result.diverged && !episode_samples.empty()) {
            try {
                if (cfg.minibatch_states == 0) {
                    // Paper-default update: one mean-gradient ascent step over
                    // the episode's agent-state pairs.
                    if (!apply(episode_samples)) result.diverged = true;
                } else {
                    for (auto& s : episode_samples) keep(std::move(s));
                    for (int u = 0; u < cfg.updates_per_episode && !result.diverged; ++u) {
                        std::vector<PolicySample> draw;
                        for (int i = 0; i < cfg.minibatch_states; ++i)
                            draw.push_back(store[rand_int(rng, 0, static_cast<int>(store.size()) - 1)]);
                        if (!apply(draw)) result.diverged = true;
                    }
                }
            } catch (const NonFiniteLossError&) {
                net.set_parameters(last_good);
                result.diverged = true;
            }
        }

        EpisodeLog e;
        e.episode = episode;
        e.env_steps = env_steps;
        e.early_stage = early;
        e.completed = state.terminal();
        if (e.completed) {
            e.reward = terminal_reward(state);
            e.normalized_reward = normalized_reward(state, initial);
            e.win = e.reward > 0;
        }
        e.mean_loss = decisions > 0 ? loss_sum / static_cast<double>(decisions) : 0.0;
        result.log.push_back(e);
        ++episode;
    }
    return result;
}

ImitationResult fit_imitation(const Demonstration& demo, const ImitationConfig& cfg) {
    if (demo.records.empty()) throw EmptyRequestError("fit_imitation needs a nonempty demonstration");

    // Flatten to per-agent samples: one-hot target on the recorded action.
    struct Flat {
        Eigen::VectorXd features;
        std::vector<int> legal;
        int action = 0;
    };
    std::vector<Flat> all;
    int input_dim = 0, act_dim = 0;
    for (const auto& rec : demo.records) {
        for (const auto& [agent, action] : rec.actions) {
            Flat f;
            f.features = features(rec.state, agent);
            for (const Action& a : legal_actions(rec.state, agent)) f.legal.push_back(a.index());
            f.action = action.index();
            input_dim = static_cast<int>(f.features.size());
            act_dim = action_dim(rec.state, Team::allied);
            all.push_back(std::move(f));
        }
    }

    std::mt19937_64 rng(splitmix64(cfg.seed ^ 0x696d69));
    std::vector<int> order(all.size());
    std::iota(order.begin(), order.end(), 0);
    for (int i = static_cast<int>(order.size()) - 1; i > 0; --i)
        std::swap(order[i], order[rand_int(rng, 0, i)]);
    const int holdout = std::min(static_cast<int>(all.size()) - 1,
                                 static_cast<int>(cfg.holdout_fraction * all.size()));
    std::vector<int> eval_idx(order.begin(), order.begin() + holdout);
    std::vector<int> train_idx(order.begin() + holdout, order.end());

    NetConfig net_cfg;
    net_cfg.input_dim = input_dim;
    net_cfg.hidden = cfg.hidden;
    net_cfg.action_dim = act_dim;
    net_cfg.normalization = cfg.normalization;
    net_cfg.init_seed = cfg.seed;
    ImitationResult result{PolicyNetwork(net_cfg), 0.0, 0.0};
    PolicyNetwork& net = result.net;

    for (int i : train_idx) net.observe(all[i].features);

    auto as_sample = [&](const Flat& f) {
        PolicySample s;
        s.features = f.features;
        s.legal = f.legal;
        s.target = Eigen::VectorXd::Zero(act_dim);
        s.target[f.action] = 1.0;
        return s;
    };

    auto momentum_buf = net.make_gradients();
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        // Linear decay to a tenth of the initial rate settles the late epochs.
        double lr = cfg.learning_rate *
                    (1.0 - 0.9 * static_cast<double>(epoch) / std::max(1, cfg.epochs - 1));
        for (int i = static_cast<int>(train_idx.size()) - 1; i > 0; --i)
            std::swap(train_idx[i], train_idx[rand_int(rng, 0, i)]);
        for (std::size_t at = 0; at < train_idx.size(); at += cfg.batch_size) {
            std::vector<PolicySample> batch;
            for (std::size_t i = at; i < std::min(at + cfg.batch_size, train_idx.size()); ++i)
                batch.push_back(as_sample(all[train_idx[i]]));
            auto grads = policy_gradient(net, batch);
            grads.scale(1.0 / batch.size());
            if (cfg.clip_norm > 0.0) grads.clip(cfg.clip_norm);
            if (cfg.momentum > 0.0) {
                momentum_buf.scale(cfg.momentum);
                momentum_buf.axpy(1.0, grads);
                net.apply_update(momentum_buf, lr);
            } else {
                net.apply_update(grads, lr);
            }
            if (!net.parameters().allFinite()) throw NonFiniteLossError("imitation diverged");
        }
    }

    std::vector<PolicySample> train_batch;
    for (int i : train_idx) train_batch.push_back(as_sample(all[i]));
    result.final_loss = kl_loss(net, train_batch) / static_cast<double>(train_batch.size());

    int agree = 0;
    for (int i : eval_idx) {
        Eigen::VectorXd p = net.masked_forward(all[i].features, all[i].legal);
        int best = all[i].legal.front();
        for (int a : all[i].legal)
            if (p[a] > p[best]) best = a;
        agree += best == all[i].action ? 1 : 0;
    }
    result.holdout_agreement = eval_idx.empty() ? 1.0 : static_cast<double>(agree) / eval_idx.size();
    return result;
}

}  // namespace skirmish
