#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <fstream>

#include "fixtures.hpp"
#include "skirmish/demonstrators.hpp"
#include "skirmish/learner.hpp"

using namespace skirmish;
using namespace skirmish::test;

namespace {

Eigen::VectorXd vec(std::initializer_list<double> xs) {
    Eigen::VectorXd v(static_cast<int>(xs.size()));
    int i = 0;
    for (double x : xs) v[i++] = x;
    return v;
}

}  // namespace

TEST_CASE("objective policy collapses near-ties onto the best response") {
    Eigen::VectorXd p = objective_policy(vec({0.51, 0.49}));
    CHECK(p[0] == doctest::Approx(1.0));
    CHECK(p[1] == doctest::Approx(0.0));
}

TEST_CASE("objective policy keeps proportions after the min shift") {
    Eigen::VectorXd p = objective_policy(vec({3.0, 1.0, 0.0}));
    CHECK(p[0] == doctest::Approx(3.0 / 4.0));
    CHECK(p[1] == doctest::Approx(1.0 / 4.0));
    CHECK(p[2] == doctest::Approx(0.0));
}

TEST_CASE("all-equal responses degenerate to the uniform distribution") {
    Eigen::VectorXd p = objective_policy(vec({2.5, 2.5, 2.5, 2.5}));
    for (int i = 0; i < 4; ++i) CHECK(p[i] == doctest::Approx(0.25));
}

TEST_CASE("objective policy is invariant under positive affine maps of Q") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 20; ++trial) {
        int n = static_cast<int>(rand_int(rng, 2, 7));
        Eigen::VectorXd q(n);
        for (int i = 0; i < n; ++i) q[i] = 10.0 * (rand_unit(rng) - 0.5);
        double c = 0.1 + 5.0 * rand_unit(rng);
        double b = 20.0 * (rand_unit(rng) - 0.5);
        CHECK(scale_invariance_check(q, c));
        Eigen::VectorXd shifted = (c * q).array() + b;
        CHECK(objective_policy(q).isApprox(objective_policy(shifted), 1e-9));
    }
}

TEST_CASE("kl loss is the target entropy at a matching policy and larger elsewhere") {
    NetConfig cfg;
    cfg.input_dim = 4;
    cfg.hidden = {8, 8, 8};
    cfg.action_dim = 3;
    cfg.init_seed = 1;
    PolicyNetwork net(cfg);  // uniform over legal actions

    PolicySample s;
    s.features = vec({0.2, -0.1, 0.4, 0.0});
    s.legal = {0, 1, 2};
    s.target = vec({1.0 / 3, 1.0 / 3, 1.0 / 3});
    // Matching (uniform) policy: loss equals the target entropy log 3.
    CHECK(kl_loss(net, {s}) == doctest::Approx(std::log(3.0)));

    // A one-hot target against the uniform policy costs exactly log 3 too,
    // but any step along the ascent gradient must reduce it.
    s.target = vec({1.0, 0.0, 0.0});
    double before = kl_loss(net, {s});
    CHECK(before == doctest::Approx(std::log(3.0)));
    auto g = policy_gradient(net, {s});
    net.apply_update(g, 0.5);
    CHECK(kl_loss(net, {s}) < before);
}

TEST_CASE("illegal actions never receive probability and contribute no loss") {
    NetConfig cfg;
    cfg.input_dim = 4;
    cfg.hidden = {8, 8, 8};
    cfg.action_dim = 4;
    cfg.init_seed = 2;
    PolicyNetwork net(cfg);
    PolicySample s;
    s.features = vec({1.0, 2.0, 3.0, 4.0});
    s.legal = {1, 3};
    s.target = vec({0.0, 0.7, 0.0, 0.3});
    Eigen::VectorXd p = net.masked_forward(s.features, s.legal);
    CHECK(p[0] == 0.0);
    CHECK(p[2] == 0.0);
    CHECK(std::isfinite(kl_loss(net, {s})));
}

TEST_CASE("train config round-trips through json and rejects bad values") {
    TrainConfig cfg;
    cfg.learning_rate = 3e-4;
    cfg.total_env_steps = 1234;
    cfg.early_stage_fraction = 0.25;
    cfg.brd_iterations = 7;
    cfg.minibatch_states = 16;
    cfg.updates_per_episode = 24;
    cfg.sample_capacity = 5000;
    cfg.seed = 99;
    cfg.q_mode = QMode::demo_only;
    cfg.hidden = {32, 16, 16};
    std::string path = "train_cfg_test.json";
    save_train_config(cfg, path);
    TrainConfig back = load_train_config(path);
    std::remove(path.c_str());
    CHECK(back.learning_rate == cfg.learning_rate);
    CHECK(back.total_env_steps == cfg.total_env_steps);
    CHECK(back.early_stage_fraction == cfg.early_stage_fraction);
    CHECK(back.brd_iterations == cfg.brd_iterations);
    CHECK(back.minibatch_states == cfg.minibatch_states);
    CHECK(back.updates_per_episode == cfg.updates_per_episode);
    CHECK(back.sample_capacity == cfg.sample_capacity);
    CHECK(back.seed == cfg.seed);
    CHECK(back.q_mode == cfg.q_mode);
    CHECK(back.hidden == cfg.hidden);

    TrainConfig bad;
    bad.learning_rate = -1.0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = TrainConfig{};
    bad.early_stage_fraction = 1.5;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = TrainConfig{};
    bad.brd_iterations = 0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = TrainConfig{};
    bad.updates_per_episode = 0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("a zero step budget returns an untouched uniform network") {
    Scenario sc = small_scenario(1, 1);
    TrainConfig cfg;
    cfg.total_env_steps = 0;
    cfg.hidden = {8, 8, 8};
    cfg.seed = 3;
    TrainResult r = train(sc, make_attack_closest(), make_attack_closest(), cfg);
    CHECK(r.log.empty());
    CHECK_FALSE(r.diverged);
    GameState s = spawn(sc, 1);
    NetworkPolicy pol(r.net);
    Eigen::VectorXd p = pol.action_distribution(s, s.living_units(Team::allied)[0]);
    std::vector<int> legal_idx;
    for (const Action& a : legal_actions(s, s.living_units(Team::allied)[0]))
        legal_idx.push_back(a.index());
    for (int i : legal_idx) CHECK(p[i] == doctest::Approx(1.0 / legal_idx.size()));
}

TEST_CASE("short training on a duel improves alignment with the winning action") {
    // 1v1 where the allied unit outguns the enemy (2 hits to kill vs 3):
    // equilibrium play wins every episode, so the targets consistently favor
    // attacking and the losses stay finite.
    Scenario sc = small_scenario(1, 1);
    sc.allied.spec.damage = 6;
    sc.max_steps = 20;
    TrainConfig cfg;
    cfg.total_env_steps = 120;
    cfg.learning_rate = 0.05;
    cfg.hidden = {16, 16, 16};
    cfg.seed = 11;
    cfg.early_stage_fraction = 1.0;  // stay on equilibrium actions
    TrainResult r = train(sc, make_attack_closest(), make_attack_closest(), cfg);
    CHECK_FALSE(r.diverged);
    CHECK_FALSE(r.log.empty());
    // The recorded losses must be finite and completed episodes must be wins.
    int completed_wins = 0, completed = 0;
    for (const auto& ep : r.log) {
        CHECK(std::isfinite(ep.mean_loss));
        if (ep.completed) {
            ++completed;
            completed_wins += ep.win;
        }
    }
    CHECK(completed > 0);
    CHECK(completed_wins == completed);

    // Stage flag flips once the budget fraction is spent.
    TrainConfig staged = cfg;
    staged.early_stage_fraction = 0.5;
    staged.total_env_steps = 80;
    TrainResult rs = train(sc, make_attack_closest(), make_attack_closest(), staged);
    bool saw_early = false, saw_late = false;
    bool flipped_back = false, last_early = true;
    for (const auto& ep : rs.log) {
        saw_early |= ep.early_stage;
        saw_late |= !ep.early_stage;
        if (!last_early && ep.early_stage) flipped_back = true;
        last_early = ep.early_stage;
    }
    CHECK(saw_early);
    CHECK(saw_late);
    CHECK_FALSE(flipped_back);
}

TEST_CASE("imitation learning reproduces the demonstrator on held-out states") {
    Scenario sc = small_scenario(2, 2);
    Demonstration demo = record_demonstration(sc, make_attack_closest(), make_attack_closest(),
                                              /*episodes=*/60, /*seed=*/5);
    ImitationConfig cfg;
    cfg.hidden = {64, 64, 64};
    cfg.seed = 6;
    ImitationResult r = fit_imitation(demo, cfg);
    CHECK(std::isfinite(r.final_loss));
    CHECK(r.holdout_agreement >= 0.9);
}

TEST_CASE("train log serializes one row per episode") {
    std::vector<EpisodeLog> log(3);
    log[0].episode = 0;
    log[0].win = true;
    log[0].normalized_reward = 0.46;
    log[1].episode = 1;
    log[2].episode = 2;
    std::string path = "train_log_test.csv";
    save_train_log(log, path);
    std::ifstream in(path);
    std::string line;
    int rows = 0;
    while (std::getline(in, line))
        if (!line.empty()) ++rows;
    in.close();
    std::remove(path.c_str());
    CHECK(rows == 4);  // header + 3 episodes
}
