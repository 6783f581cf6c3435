#pragma once

#include <functional>
#include <string>
#include <vector>

#include "skirmish/policy.hpp"

namespace skirmish {

/// Centralized state-action value callable used by the equilibrium search.
using QFunction = std::function<double(const GameState&, const JointAction&)>;

/// Per-agent response values at the returned joint action.
struct ResponseProfile {
    std::vector<int> agents;                        // global unit indices, sweep order
    std::vector<std::vector<Action>> actions;       // legal actions per agent
    std::vector<Eigen::VectorXd> responses;         // last sweep's Q(s, a, A^{-g}) per agent
    JointAction joint;                              // the equilibrium candidate
    bool fixed_point = false;                       // true when the last full sweep changed nothing
};

struct TraceEntry {
    int agent = 0;
    JointAction joint;
    double q = 0.0;
};

/// Sequential per-agent argmax updates against the others' fixed actions.
/// Initialization comes from the demonstration policy's greedy joint action;
/// ties keep the incumbent action, otherwise the lowest action index wins.
/// With `early_exit`, sweeping stops once a full sweep changes nothing (the
/// result is unchanged, only the Q evaluation count drops).
ResponseProfile best_response_dynamics(const GameState& state, const QFunction& q,
                                       const PolicyHandle& init, int iterations,
                                       bool early_exit = false);

/// As best_response_dynamics, but records Q(s, A) after every single-agent
/// update for monotonicity checks.
std::vector<TraceEntry> sweep_trace(const GameState& state, const QFunction& q,
                                    const PolicyHandle& init, int iterations);

/// Explicit payoff table over small joint-action spaces; the brute-force
/// oracle substrate for equilibrium tests.
class PayoffTensor {
  public:
    PayoffTensor(std::vector<int> actions_per_agent, std::vector<double> payoffs);

    int num_agents() const { return static_cast<int>(shape_.size()); }
    const std::vector<int>& shape() const { return shape_; }
    double payoff(const std::vector<int>& joint) const;
    int joint_count() const;

    static PayoffTensor load(const std::string& path);
    void save(const std::string& path) const;

    /// Generic best-response dynamics over the table, mirroring the engine
    /// variant; used to validate the dynamics against brute_force_pne.
    struct Result {
        std::vector<int> joint;
        bool fixed_point = false;
        std::vector<double> trace;  // payoff after every deviator update
    };
    Result best_response(const std::vector<int>& init, int iterations) const;

  private:
    std::vector<int> shape_;
    std::vector<double> payoffs_;
    int flat_index(const std::vector<int>& joint) const;
};

/// Exhaustive enumeration of all pure Nash equilibria: joint actions where no
/// unilateral deviation strictly improves the payoff. May be empty.
std::vector<std::vector<int>> brute_force_pne(const PayoffTensor& payoffs);

}  // namespace skirmish
