#include "skirmish/game_theory.hpp"

#include <fstream>
#include <sstream>

namespace skirmish {

namespace {

ResponseProfile run_dynamics(const GameState& state, const QFunction& q, const PolicyHandle& init,
                             int iterations, bool early_exit, std::vector<TraceEntry>* trace) {
    if (state.terminal()) throw TerminalStateError("best_response_dynamics on a terminal state");
    if (iterations < 1) throw ConfigError("iterations must be >= 1");

    ResponseProfile profile;
    profile.agents = state.living_units(Team::allied);
    for (int id : profile.agents) profile.actions.push_back(legal_actions(state, id));
    profile.responses.resize(profile.agents.size());
    profile.joint = greedy_joint_action(*init, state, Team::allied);

    for (int iter = 0; iter < iterations; ++iter) {
        bool changed = false;
        for (std::size_t gi = 0; gi < profile.agents.size(); ++gi) {
            int agent = profile.agents[gi];
            const auto& acts = profile.actions[gi];
            Eigen::VectorXd resp(acts.size());
            JointAction probe = profile.joint;
            for (std::size_t ai = 0; ai < acts.size(); ++ai) {
                probe[agent] = acts[ai];
                resp[static_cast<int>(ai)] = q(state, probe);
            }
            double best = resp.maxCoeff();
            Action incumbent = profile.joint.at(agent);
            Action chosen = incumbent;
            auto inc_it = std::find(acts.begin(), acts.end(), incumbent);
            if (inc_it == acts.end() || resp[static_cast<int>(inc_it - acts.begin())] != best) {
                for (std::size_t ai = 0; ai < acts.size(); ++ai) {
                    if (resp[static_cast<int>(ai)] == best) {
                        chosen = acts[ai];
                        break;
                    }
                }
            }
            if (!(chosen == incumbent)) changed = true;
            profile.joint[agent] = chosen;
            profile.responses[gi] = resp;
            if (trace) trace->push_back({agent, profile.joint, best});
        }
        if (!changed) {
            profile.fixed_point = true;
            if (early_exit) break;
        } else {
            profile.fixed_point = false;
        }
    }
    return profile;
}

}  // namespace

ResponseProfile best_response_dynamics(const GameState& state, const QFunction& q,
                                       const PolicyHandle& init, int iterations, bool early_exit) {
    return run_dynamics(state, q, init, iterations, early_exit, nullptr);
}

std::vector<TraceEntry> sweep_trace(const GameState& state, const QFunction& q,
                                    const PolicyHandle& init, int iterations) {
    std::vector<TraceEntry> trace;
    run_dynamics(state, q, init, iterations, false, &trace);
    return trace;
}

PayoffTensor::PayoffTensor(std::vector<int> actions_per_agent, std::vector<double> payoffs)
    : shape_(std::move(actions_per_agent)), payoffs_(std::move(payoffs)) {
    if (shape_.empty()) throw IncompleteTensorError("tensor needs at least one agent");
    long expected = 1;
    for (int n : shape_) {
        if (n < 1) throw IncompleteTensorError("agent with empty action set");
        expected *= n;
    }
    if (static_cast<long>(payoffs_.size()) != expected)
        throw IncompleteTensorError("payoff table size does not match the joint action space");
    for (double v : payoffs_)
        if (!std::isfinite(v)) throw IncompleteTensorError("non-finite payoff");
}

int PayoffTensor::flat_index(const std::vector<int>& joint) const {
    if (static_cast<int>(joint.size()) != num_agents())
        throw IncompleteTensorError("joint action arity mismatch");
    int idx = 0;
    for (int g = 0; g < num_agents(); ++g) {
        if (joint[g] < 0 || joint[g] >= shape_[g]) throw IncompleteTensorError("action out of range");
        idx = idx * shape_[g] + joint[g];
    }
    return idx;
}

double PayoffTensor::payoff(const std::vector<int>& joint) const { return payoffs_[flat_index(joint)]; }

int PayoffTensor::joint_count() const { return static_cast<int>(payoffs_.size()); }

PayoffTensor PayoffTensor::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open tensor file: " + path);
    int agents;
    in >> agents;
    std::vector<int> shape(agents);
    for (int& n : shape) in >> n;
    long count = 1;
    for (int n : shape) count *= n;
    std::vector<double> payoffs(count);
    std::vector<bool> seen(count, false);
    for (long i = 0; i < count; ++i) {
        std::vector<int> joint(agents);
        double v;
        for (int& a : joint) in >> a;
        in >> v;
        if (!in) throw IncompleteTensorError("truncated tensor file");
        int idx = 0;
        for (int g = 0; g < agents; ++g) idx = idx * shape[g] + joint[g];
        payoffs[idx] = v;
        seen[idx] = true;
    }
    for (bool s : seen)
        if (!s) throw IncompleteTensorError("missing joint action entry");
    return PayoffTensor(shape, payoffs);
}

void PayoffTensor::save(const std::string& path) const {
    std::ofstream out(path);
    out.precision(17);  // shortest round-trippable doubles
    out << num_agents();
    for (int n : shape_) out << ' ' << n;
    out << '\n';
    std::vector<int> joint(num_agents(), 0);
    for (int i = 0; i < joint_count(); ++i) {
        for (int a : joint) out << a << ' ';
        out << payoffs_[flat_index(joint)] << '\n';
        for (int g = num_agents() - 1; g >= 0; --g) {
            if (++joint[g] < shape_[g]) break;
            joint[g] = 0;
        }
    }
}

PayoffTensor::Result PayoffTensor::best_response(const std::vector<int>& init, int iterations) const {
    Result r;
    r.joint = init;
    for (int iter = 0; iter < iterations; ++iter) {
        bool changed = false;
        for (int g = 0; g < num_agents(); ++g) {
            std::vector<int> probe = r.joint;
            double best = -std::numeric_limits<double>::infinity();
            for (int a = 0; a < shape_[g]; ++a) {
                probe[g] = a;
                best = std::max(best, payoff(probe));
            }
            probe[g] = r.joint[g];
            int chosen = r.joint[g];
            if (payoff(probe) != best) {
                for (int a = 0; a < shape_[g]; ++a) {
                    probe[g] = a;
                    if (payoff(probe) == best) {
                        chosen = a;
                        break;
                    }
                }
            }
            if (chosen != r.joint[g]) changed = true;
            r.joint[g] = chosen;
            r.trace.push_back(best);
        }
        r.fixed_point = !changed;
        if (r.fixed_point) break;
    }
    return r;
}

std::vector<std::vector<int>> brute_force_pne(const PayoffTensor& payoffs) {
    std::vector<std::vector<int>> result;
    std::vector<int> joint(payoffs.num_agents(), 0);
    for (int i = 0; i < payoffs.joint_count(); ++i) {
        double v = payoffs.payoff(joint);
        bool pne = true;
        for (int g = 0; g < payoffs.num_agents() && pne; ++g) {
            std::vector<int> dev = joint;
            for (int a = 0; a < payoffs.shape()[g]; ++a) {
                dev[g] = a;
                if (payoffs.payoff(dev) > v) {
                    pne = false;
                    break;
                }
            }
        }
        if (pne) result.push_back(joint);
        for (int g = payoffs.num_agents() - 1; g >= 0; --g) {
            if (++joint[g] < payoffs.shape()[g]) break;
            joint[g] = 0;
        }
    }
    return result;
}

}  // namespace skirmish
