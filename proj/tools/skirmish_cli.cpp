// Command-line surface for the micro-combat learning pipeline.
//
// Exit codes: 0 success, 1 configuration error, 2 training divergence,
// 3 acceptance-check failure.

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>

#include "skirmish/harness.hpp"
#include "skirmish/serialize.hpp"

namespace fs = std::filesystem;
using namespace skirmish;

namespace {

PolicyHandle heuristic_by_name(const std::string& name) {
    if (name == "c" || name == "closest") return make_attack_closest();
    if (name == "w" || name == "weakest") return make_attack_weakest();
    throw ConfigError("unknown heuristic: " + name + " (expected c or w)");
}

PolicyHandle policy_from_args(const std::string& heuristic, const std::string& checkpoint,
                              std::shared_ptr<PolicyNetwork>& keep_alive) {
    if (!checkpoint.empty()) {
        keep_alive = std::make_shared<PolicyNetwork>(PolicyNetwork::load(checkpoint));
        return std::make_shared<NetworkPolicy>(*keep_alive);
    }
    return heuristic_by_name(heuristic);
}

void write_file(const fs::path& path, const std::string& content) {
    fs::create_directories(path.parent_path().empty() ? "." : path.parent_path());
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write " + path.string());
    out << content;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"skirmish: cooperative micro-combat learning from sub-optimal demonstration"};
    app.require_subcommand(1);

    std::string scenario_path, config_path, out_dir = "out";
    std::uint64_t seed = 0;
    app.add_option("--scenario", scenario_path, "Scenario file (JSON)");
    app.add_option("--seed", seed, "Master RNG seed");
    app.add_option("--config", config_path, "Train config file (JSON)");
    app.add_option("--out", out_dir, "Output directory");

    // demo-record
    auto* demo_cmd = app.add_subcommand("demo-record", "Record heuristic demonstration episodes");
    std::string demo_heuristic = "c", demo_opponent = "w";
    int demo_episodes = 10;
    demo_cmd->add_option("--heuristic", demo_heuristic, "Demonstrator: c or w");
    demo_cmd->add_option("--opponent", demo_opponent, "Opponent heuristic: c or w");
    demo_cmd->add_option("--episodes", demo_episodes, "Episode count");

    // imitate
    auto* imitate_cmd = app.add_subcommand("imitate", "Fit a policy network to a demonstration file");
    std::string demo_path;
    double imitate_lr = ImitationConfig{}.learning_rate;
    int imitate_epochs = ImitationConfig{}.epochs;
    imitate_cmd->add_option("--demo", demo_path, "Demonstration file")->required();
    imitate_cmd->add_option("--lr", imitate_lr, "Learning rate");
    imitate_cmd->add_option("--epochs", imitate_epochs, "Training epochs");

    // train
    auto* train_cmd = app.add_subcommand("train", "Run the full training loop");
    std::string train_demo = "c", train_opponent = "w", train_qmode = "full", train_demo_ckpt;
    train_cmd->add_option("--demonstrator", train_demo, "Demonstration heuristic: c or w");
    train_cmd->add_option("--demo-checkpoint", train_demo_ckpt,
                          "Imitation checkpoint to use as the demonstration policy (the observed-data modality)");
    train_cmd->add_option("--opponent", train_opponent, "Opponent heuristic: c or w");
    train_cmd->add_option("--q-mode", train_qmode, "Q backing: full, demo_only or theta_only");

    // evaluate
    auto* eval_cmd = app.add_subcommand("evaluate", "Play seeded evaluation battles");
    std::string eval_ckpt, eval_policy = "c", eval_opponent = "w";
    int eval_battles = 0;
    eval_cmd->add_option("--checkpoint", eval_ckpt, "Allied network checkpoint");
    eval_cmd->add_option("--policy", eval_policy, "Allied heuristic when no checkpoint is given");
    eval_cmd->add_option("--opponent", eval_opponent, "Opponent heuristic: c or w");
    eval_cmd->add_option("--battles", eval_battles, "Battle count (default: scenario eval_battles)");

    // ablate
    auto* ablate_cmd = app.add_subcommand("ablate", "Train and evaluate the three Q backings");
    std::string ablate_demo = "c", ablate_opponent = "w";
    ablate_cmd->add_option("--demonstrator", ablate_demo, "Demonstration heuristic: c or w");
    ablate_cmd->add_option("--opponent", ablate_opponent, "Opponent heuristic: c or w");

    // crossval
    auto* crossval_cmd = app.add_subcommand("crossval", "Cross-validation: learn from c fight w, and vice versa");

    // lemma1
    auto* lemma_cmd = app.add_subcommand("lemma1", "Empirical check of the equilibrium-return inequality");
    std::string lemma_demo = "c", lemma_opponent = "w";
    int lemma_samples = 20;
    lemma_cmd->add_option("--demonstrator", lemma_demo, "Demonstration heuristic: c or w");
    lemma_cmd->add_option("--opponent", lemma_opponent, "Opponent heuristic: c or w");
    lemma_cmd->add_option("--samples", lemma_samples, "Sample count");

    // oracle-pne
    auto* oracle_cmd = app.add_subcommand("oracle-pne", "Enumerate pure Nash equilibria of a payoff tensor");
    std::string tensor_path;
    oracle_cmd->add_option("--tensor", tensor_path, "Payoff tensor file")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        fs::create_directories(out_dir);

        auto need_scenario = [&]() {
            if (scenario_path.empty()) throw ConfigError("--scenario is required for this command");
            return load_scenario(scenario_path);
        };
        auto load_cfg = [&]() {
            TrainConfig cfg = config_path.empty() ? TrainConfig{} : load_train_config(config_path);
            if (app.count("--seed")) cfg.seed = seed;
            return cfg;
        };

        if (*demo_cmd) {
            Scenario sc = need_scenario();
            auto demo = record_demonstration(sc, heuristic_by_name(demo_heuristic),
                                             heuristic_by_name(demo_opponent), demo_episodes, seed);
            fs::path path = fs::path(out_dir) / ("demo_" + sc.name + "_" + demo_heuristic + ".txt");
            save_demonstration(demo, path.string());
            std::cout << "recorded " << demo.records.size() << " records -> " << path << "\n";
        } else if (*imitate_cmd) {
            ImitationConfig cfg;
            cfg.learning_rate = imitate_lr;
            cfg.epochs = imitate_epochs;
            cfg.seed = seed;
            auto result = fit_imitation(load_demonstration(demo_path), cfg);
            fs::path path = fs::path(out_dir) / "imitation.ckpt";
            result.net.save(path.string());
            std::cout << "final mean cross-entropy " << result.final_loss << ", held-out agreement "
                      << result.holdout_agreement << " -> " << path << "\n";
        } else if (*train_cmd) {
            Scenario sc = need_scenario();
            TrainConfig cfg = load_cfg();
            if (train_qmode == "demo_only") cfg.q_mode = QMode::demo_only;
            else if (train_qmode == "theta_only") cfg.q_mode = QMode::theta_only;
            else if (train_qmode != "full") throw ConfigError("unknown q-mode: " + train_qmode);
            std::shared_ptr<PolicyNetwork> keep;
            PolicyHandle demonstration = policy_from_args(train_demo, train_demo_ckpt, keep);
            TrainResult result = train(sc, demonstration, heuristic_by_name(train_opponent), cfg);
            fs::path ckpt = fs::path(out_dir) / ("train_" + sc.name + ".ckpt");
            result.net.save(ckpt.string());
            save_train_log(result.log, (fs::path(out_dir) / ("train_" + sc.name + ".csv")).string());
            if (result.diverged) {
                std::cerr << "training diverged; last finite checkpoint kept at " << ckpt << "\n";
                return 2;
            }
            std::cout << "trained " << result.log.size() << " episodes -> " << ckpt << "\n";
        } else if (*eval_cmd) {
            Scenario sc = need_scenario();
            std::shared_ptr<PolicyNetwork> keep;
            PolicyHandle allied = policy_from_args(eval_policy, eval_ckpt, keep);
            int battles = eval_battles > 0 ? eval_battles : sc.eval_battles;
            EvalReport report =
                evaluate(allied, heuristic_by_name(eval_opponent), sc, battles, seed);
            fs::path path = fs::path(out_dir) / ("eval_" + sc.name + ".json");
            write_file(path, report.to_json() + "\n");
            std::cout << "W=" << report.win_rate << " R=" << report.mean_normalized_reward
                      << " invalid=" << report.invalid_attack_ratio << " -> " << path << "\n";
        } else if (*ablate_cmd) {
            Scenario sc = need_scenario();
            TrainConfig cfg = load_cfg();
            AblationReport report =
                run_ablation(sc, heuristic_by_name(ablate_demo), heuristic_by_name(ablate_opponent),
                             cfg, sc.eval_battles, splitmix64(seed + 1));
            nlohmann::json j = {{"full", nlohmann::json::parse(report.full.to_json())},
                                {"demo_only", nlohmann::json::parse(report.demo_only.to_json())},
                                {"theta_only", nlohmann::json::parse(report.theta_only.to_json())}};
            fs::path path = fs::path(out_dir) / ("ablation_" + sc.name + ".json");
            write_file(path, j.dump(2) + "\n");
            std::cout << "W full=" << report.full.win_rate << " demo_only=" << report.demo_only.win_rate
                      << " theta_only=" << report.theta_only.win_rate << " -> " << path << "\n";
        } else if (*crossval_cmd) {
            Scenario sc = need_scenario();
            TrainConfig cfg = load_cfg();
            CrossValReport report = cross_validation_run(sc, cfg, sc.eval_battles, splitmix64(seed + 1));
            nlohmann::json j = {{"baseline_c_vs_w", nlohmann::json::parse(report.baseline_c_vs_w.to_json())},
                                {"trained_c_vs_w", nlohmann::json::parse(report.trained_c_vs_w.to_json())},
                                {"baseline_w_vs_c", nlohmann::json::parse(report.baseline_w_vs_c.to_json())},
                                {"trained_w_vs_c", nlohmann::json::parse(report.trained_w_vs_c.to_json())}};
            fs::path path = fs::path(out_dir) / ("crossval_" + sc.name + ".json");
            write_file(path, j.dump(2) + "\n");
            std::cout << "c->w: W " << report.baseline_c_vs_w.win_rate << " => "
                      << report.trained_c_vs_w.win_rate << "; w->c: W " << report.baseline_w_vs_c.win_rate
                      << " => " << report.trained_w_vs_c.win_rate << " -> " << path << "\n";
        } else if (*lemma_cmd) {
            Scenario sc = need_scenario();
            Lemma1Report report = check_lemma1(sc, heuristic_by_name(lemma_demo),
                                               heuristic_by_name(lemma_opponent), lemma_samples, seed);
            fs::path path = fs::path(out_dir) / ("lemma1_" + sc.name + ".json");
            write_file(path, report.to_json() + "\n");
            std::cout << report.violations << " violations over " << report.samples.size()
                      << " samples -> " << path << "\n";
            if (report.violations > 0) return 3;
        } else if (*oracle_cmd) {
            PayoffTensor tensor = PayoffTensor::load(tensor_path);
            auto pne = brute_force_pne(tensor);
            for (const auto& joint : pne) {
                for (std::size_t i = 0; i < joint.size(); ++i)
                    std::cout << joint[i] << (i + 1 < joint.size() ? ' ' : '\n');
            }
            std::cout << pne.size() << " pure equilibria\n";
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const NonFiniteLossError& e) {
        std::cerr << "training divergence: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
