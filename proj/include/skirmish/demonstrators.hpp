#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "skirmish/policy.hpp"
#include "skirmish/scenario.hpp"

namespace skirmish {

/// Attack the in-range enemy at minimal Chebyshev distance (ties: lower hp,
/// then lower unit id); off cooldown or out of range, move toward the closest
/// living enemy.
Action attack_closest(const GameState& state, int agent);

/// Attack the in-range enemy with minimum remaining hp (ties: closer, then
/// lower unit id); otherwise identical movement to attack_closest.
Action attack_weakest(const GameState& state, int agent);

/// Wraps a deterministic heuristic as a one-hot Policy.
class HeuristicPolicy : public Policy {
  public:
    using Fn = Action (*)(const GameState&, int);
    explicit HeuristicPolicy(Fn fn) : fn_(fn) {}
    Eigen::VectorXd action_distribution(const GameState& state, int agent) const override;

  private:
    Fn fn_;
};

inline PolicyHandle make_attack_closest() { return std::make_shared<HeuristicPolicy>(&attack_closest); }
inline PolicyHandle make_attack_weakest() { return std::make_shared<HeuristicPolicy>(&attack_weakest); }

struct DemoRecord {
    int episode = 0;
    int step = 0;
    GameState state;
    std::vector<std::pair<int, Action>> actions;  // (agent id, action) per living ally
};

struct Demonstration {
    std::vector<DemoRecord> records;
};

/// Plays seeded episodes of `policy` against `opponent` and logs every allied
/// (state, action) decision. Deterministic given the seed.
Demonstration record_demonstration(const Scenario& scenario, const PolicyHandle& policy,
                                   const PolicyHandle& opponent, int episodes, std::uint64_t seed);

/// Line-delimited record format; round-trips bit-exactly.
void save_demonstration(const Demonstration& demo, const std::string& path);
Demonstration load_demonstration(const std::string& path);

}  // namespace skirmish
