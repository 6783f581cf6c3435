#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <vector>

#include "skirmish/policy.hpp"

namespace skirmish {

struct NetConfig {
    int input_dim = 1;
    std::vector<int> hidden = {256, 128, 128};
    int action_dim = 1;
    bool normalization = true;
    double leaky_slope = 0.01;
    double norm_momentum = 0.01;  // running-stat update rate
    double norm_eps = 1e-5;
    std::uint64_t init_seed = 0;
};

/// Four fully connected layers with running-statistics normalization and a
/// leaky rectifier after the first three, softmax on top. The final layer is
/// zero-initialized so an untrained network is the uniform policy.
///
/// Normalization statistics are frozen during forward/gradient evaluation and
/// advance only through observe(); losses and analytic gradients therefore
/// see a fixed, differentiable affine map.
class PolicyNetwork {
  public:
    explicit PolicyNetwork(const NetConfig& cfg);

    const NetConfig& config() const { return cfg_; }

    Eigen::VectorXd logits(const Eigen::VectorXd& feat) const;
    /// Softmax over the full action space.
    Eigen::VectorXd forward(const Eigen::VectorXd& feat) const;
    /// Softmax renormalized over the given legal action indices; zero elsewhere.
    Eigen::VectorXd masked_forward(const Eigen::VectorXd& feat, const std::vector<int>& legal) const;

    /// Parameter-shaped gradient container.
    struct Gradients {
        std::vector<Eigen::MatrixXd> W;
        std::vector<Eigen::VectorXd> b;
        std::vector<Eigen::VectorXd> gamma;
        std::vector<Eigen::VectorXd> beta;

        void setZero();
        void axpy(double alpha, const Gradients& other);  // this += alpha * other
        void scale(double alpha);
        double norm() const;  // global l2 norm
        void clip(double max_norm);
        bool finite() const;
    };
    Gradients make_gradients() const;

    /// Backpropagates dObjective/dlogits for one sample and accumulates the
    /// parameter gradient (same sign as the given logit gradient).
    void accumulate_gradient(const Eigen::VectorXd& feat, const Eigen::VectorXd& dlogits,
                             Gradients& grads) const;

    /// theta += lr * grads (gradient ascent step).
    void apply_update(const Gradients& grads, double lr);

    /// Updates normalization running statistics along the forward pass.
    void observe(const Eigen::VectorXd& feat);

    /// Flat parameter view (weights, biases, gamma, beta; running stats excluded).
    Eigen::VectorXd parameters() const;
    void set_parameters(const Eigen::VectorXd& theta);
    int parameter_count() const;

    void save(const std::string& path) const;
    static PolicyNetwork load(const std::string& path);

    bool operator==(const PolicyNetwork& o) const;

  private:
    struct Dense {
        Eigen::MatrixXd W;
        Eigen::VectorXd b;
    };
    struct Norm {
        Eigen::VectorXd gamma, beta, run_mean, run_var;
    };

    struct ForwardTrace;  // per-layer intermediates for backprop
    Eigen::VectorXd run_forward(const Eigen::VectorXd& feat, ForwardTrace* trace) const;

    NetConfig cfg_;
    std::vector<Dense> fc_;
    std::vector<Norm> norm_;
};

/// Policy view over a network: features in, masked action distribution out.
/// The caller owns the network; the view must not outlive it.
class NetworkPolicy : public Policy {
  public:
    explicit NetworkPolicy(const PolicyNetwork& net) : net_(&net) {}
    Eigen::VectorXd action_distribution(const GameState& state, int agent) const override;

  private:
    const PolicyNetwork* net_;
};

}  // namespace skirmish
