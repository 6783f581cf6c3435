#pragma once

#include <cstdint>
#include <optional>
#include <unordered_map>

#include "skirmish/game_theory.hpp"
#include "skirmish/scenario.hpp"

namespace skirmish {

/// Discounted terminal return of playing `first` from `state` and continuing
/// with `policy` (argmax when deterministic, seeded samples otherwise) against
/// the opponent model until terminal: lambda^(T-1-t0) * R(s_T). Exact with
/// deterministic policies: the engine itself has no stochasticity.
double rollout_return(const GameState& state, const JointAction& first, const Policy& policy,
                      const Policy& opponent, double lambda, bool deterministic_actions = true,
                      std::mt19937_64* rng = nullptr);

/// Rollout-backed Q with an exact per-decision-step memo: the equilibrium
/// search re-evaluates many overlapping joint actions against one state.
class RolloutQ {
  public:
    RolloutQ(PolicyHandle continuation, PolicyHandle opponent, double lambda, bool cache = true)
        : continuation_(std::move(continuation)), opponent_(std::move(opponent)), lambda_(lambda),
          cache_enabled_(cache) {}

    double operator()(const GameState& state, const JointAction& joint) const;

    void clear_cache() const { cache_.clear(); }
    long rollout_count() const { return rollouts_; }

    QFunction as_function() const {
        return [this](const GameState& s, const JointAction& a) { return (*this)(s, a); };
    }

  private:
    PolicyHandle continuation_;
    PolicyHandle opponent_;
    double lambda_;
    bool cache_enabled_;
    mutable std::unordered_map<std::uint64_t, double> cache_;
    mutable long rollouts_ = 0;
};

/// Q^D: continuation by the demonstration policy.
inline RolloutQ make_q_demo(PolicyHandle demonstration, PolicyHandle opponent, double lambda) {
    return RolloutQ(std::move(demonstration), std::move(opponent), lambda);
}

/// Q^theta: continuation by the learned policy's argmax actions.
inline RolloutQ make_q_theta(PolicyHandle learned, PolicyHandle opponent, double lambda) {
    return RolloutQ(std::move(learned), std::move(opponent), lambda);
}

/// Pointwise max of Q^theta and Q^D.
QFunction q_combined(const RolloutQ& q_theta, const RolloutQ& q_demo);

struct Lemma1Sample {
    std::uint64_t state_hash = 0;
    int step = 0;
    double q_demo = 0.0;
    double q_nash = 0.0;
    bool violation = false;
};

struct Lemma1Report {
    std::vector<Lemma1Sample> samples;
    int violations = 0;
    double max_violation = 0.0;

    std::string to_json() const;
};

/// Empirical check of Q^N >= Q^D: on seeded reachable (state, action) pairs,
/// compares the demonstration-continuation return against the return of
/// re-solving the equilibrium (with Q^D inside) at every subsequent step.
Lemma1Report check_lemma1(const Scenario& scenario, const PolicyHandle& demonstration,
                          const PolicyHandle& opponent, int samples, std::uint64_t seed,
                          double lambda = 1.0, int iterations = 10);

}  // namespace skirmish
