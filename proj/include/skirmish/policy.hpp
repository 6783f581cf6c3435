#pragma once

#include <Eigen/Core>
#include <memory>
#include <random>

#include "skirmish/engine.hpp"

namespace skirmish {

/// Uniform interface over demonstrator heuristics, imitation-fit policies and
/// the learned network: a distribution over the agent's full action space.
/// Mass on illegal actions is allowed; consumers mask before acting.
class Policy {
  public:
    virtual ~Policy() = default;
    virtual Eigen::VectorXd action_distribution(const GameState& state, int agent) const = 0;
};

using PolicyHandle = std::shared_ptr<const Policy>;

/// Legal action with maximum probability; ties go to the lowest action index.
Action greedy_action(const Policy& policy, const GameState& state, int agent);

/// Seeded sample from the legality_masked, temperature-scaled distribution.
Action sample_action(const Policy& policy, const GameState& state, int agent,
                     std::mt19937_64& rng, double temperature = 1.0);

/// Greedy joint action for every living unit of a team.
JointAction greedy_joint_action(const Policy& policy, const GameState& state, Team team);

JointAction sampled_joint_action(const Policy& policy, const GameState& state, Team team,
                                 std::mt19937_64& rng, double temperature = 1.0);

}  // namespace skirmish
