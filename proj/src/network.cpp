#include "skirmish/network.hpp"

#include <cmath>
#include <fstream>
#include <random>

#include "skirmish/scenario.hpp"

namespace skirmish {

namespace {

Eigen::VectorXd leaky(const Eigen::VectorXd& x, double slope) {
    return x.unaryExpr([slope](double v) { return v > 0 ? v : slope * v; });
}

Eigen::VectorXd leaky_grad(const Eigen::VectorXd& x, double slope) {
    return x.unaryExpr([slope](double v) { return v > 0 ? 1.0 : slope; });
}

}  // namespace

struct PolicyNetwork::ForwardTrace {
    Eigen::VectorXd input;
    std::vector<Eigen::VectorXd> pre_norm;   // fc output per hidden layer
    std::vector<Eigen::VectorXd> pre_act;    // after normalization
    std::vector<Eigen::VectorXd> post_act;   // after leaky rectifier
};

PolicyNetwork::PolicyNetwork(const NetConfig& cfg) : cfg_(cfg) {
    if (cfg.input_dim < 1 || cfg.action_dim < 1 || cfg.hidden.size() != 3)
        throw ConfigError("network needs input_dim, 3 hidden widths and action_dim");
    std::mt19937_64 rng(splitmix64(cfg.init_seed));
    auto uniform = [&rng](double scale) { return (2.0 * rand_unit(rng) - 1.0) * scale; };

    std::vector<int> widths = {cfg.input_dim, cfg.hidden[0], cfg.hidden[1], cfg.hidden[2], cfg.action_dim};
    for (int l = 0; l < 4; ++l) {
        Dense d;
        d.W = Eigen::MatrixXd::Zero(widths[l + 1], widths[l]);
        d.b = Eigen::VectorXd::Zero(widths[l + 1]);
        if (l < 3) {  // final layer stays zero: training starts at the uniform policy
            double scale = std::sqrt(1.0 / widths[l]);
            for (int i = 0; i < d.W.rows(); ++i)
                for (int j = 0; j < d.W.cols(); ++j) d.W(i, j) = uniform(scale);
        }
        fc_.push_back(std::move(d));
    }
    for (int l = 0; l < 3; ++l) {
        Norm n;
        n.gamma = Eigen::VectorXd::Ones(widths[l + 1]);
        n.beta = Eigen::VectorXd::Zero(widths[l + 1]);
        n.run_mean = Eigen::VectorXd::Zero(widths[l + 1]);
        n.run_var = Eigen::VectorXd::Ones(widths[l + 1]);
        norm_.push_back(std::move(n));
    }
}

Eigen::VectorXd PolicyNetwork::run_forward(const Eigen::VectorXd& feat, ForwardTrace* trace) const {
    if (feat.size() != cfg_.input_dim)
        throw DimensionMismatchError("feature length " + std::to_string(feat.size()) +
                                     " != input_dim " + std::to_string(cfg_.input_dim));
    if (trace) trace->input = feat;
    Eigen::VectorXd h = feat;
    for (int l = 0; l < 3; ++l) {
        Eigen::VectorXd z = fc_[l].W * h + fc_[l].b;
        if (trace) trace->pre_norm.push_back(z);
        if (cfg_.normalization) {
            const Norm& n = norm_[l];
            z = (n.gamma.array() * (z - n.run_mean).array() /
                 (n.run_var.array() + cfg_.norm_eps).sqrt()).matrix() + n.beta;
        }
        if (trace) trace->pre_act.push_back(z);
        h = leaky(z, cfg_.leaky_slope);
        if (trace) trace->post_act.push_back(h);
    }
    return fc_[3].W * h + fc_[3].b;
}

Eigen::VectorXd PolicyNetwork::logits(const Eigen::VectorXd& feat) const {
    return run_forward(feat, nullptr);
}

Eigen::VectorXd PolicyNetwork::forward(const Eigen::VectorXd& feat) const {
    Eigen::VectorXd z = logits(feat);
    Eigen::VectorXd e = (z.array() - z.maxCoeff()).exp();
    return e / e.sum();
}

Eigen::VectorXd PolicyNetwork::masked_forward(const Eigen::VectorXd& feat,
                                              const std::vector<int>& legal) const {
    Eigen::VectorXd z = logits(feat);
    double zmax = -std::numeric_limits<double>::infinity();
    for (int i : legal) zmax = std::max(zmax, z[i]);
    Eigen::VectorXd p = Eigen::VectorXd::Zero(z.size());
    double total = 0.0;
    for (int i : legal) {
        p[i] = std::exp(z[i] - zmax);
        total += p[i];
    }
    return p / total;
}

void PolicyNetwork::Gradients::setZero() {
    for (auto& m : W) m.setZero();
    for (auto& v : b) v.setZero();
    for (auto& v : gamma) v.setZero();
    for (auto& v : beta) v.setZero();
}

void PolicyNetwork::Gradients::axpy(double alpha, const Gradients& o) {
    for (std::size_t i = 0; i < W.size(); ++i) W[i] += alpha * o.W[i];
    for (std::size_t i = 0; i < b.size(); ++i) b[i] += alpha * o.b[i];
    for (std::size_t i = 0; i < gamma.size(); ++i) gamma[i] += alpha * o.gamma[i];
    for (std::size_t i = 0; i < beta.size(); ++i) beta[i] += alpha * o.beta[i];
}

void PolicyNetwork::Gradients::scale(double alpha) {
    for (auto& m : W) m *= alpha;
    for (auto& v : b) v *= alpha;
    for (auto& v : gamma) v *= alpha;
    for (auto& v : beta) v *= alpha;
}

double PolicyNetwork::Gradients::norm() const {
    double sq = 0.0;
    for (const auto& m : W) sq += m.squaredNorm();
    for (const auto& v : b) sq += v.squaredNorm();
    for (const auto& v : gamma) sq += v.squaredNorm();
    for (const auto& v : beta) sq += v.squaredNorm();
    return std::sqrt(sq);
}

void PolicyNetwork::Gradients::clip(double max_norm) {
    double n = norm();
    if (n > max_norm && n > 0.0) scale(max_norm / n);
}

bool PolicyNetwork::Gradients::finite() const {
    for (const auto& m : W)
        if (!m.allFinite()) return false;
    for (const auto& v : b)
        if (!v.allFinite()) return false;
    for (const auto& v : gamma)
        if (!v.allFinite()) return false;
    for (const auto& v : beta)
        if (!v.allFinite()) return false;
    return true;
}

PolicyNetwork::Gradients PolicyNetwork::make_gradients() const {
    Gradients g;
    for (const auto& d : fc_) {
        g.W.push_back(Eigen::MatrixXd::Zero(d.W.rows(), d.W.cols()));
        g.b.push_back(Eigen::VectorXd::Zero(d.b.size()));
    }
    for (const auto& n : norm_) {
        g.gamma.push_back(Eigen::VectorXd::Zero(n.gamma.size()));
        g.beta.push_back(Eigen::VectorXd::Zero(n.beta.size()));
    }
    return g;
}

void PolicyNetwork::accumulate_gradient(const Eigen::VectorXd& feat, const Eigen::VectorXd& dlogits,
                                        Gradients& grads) const {
    ForwardTrace trace;
    run_forward(feat, &trace);

    // Output layer.
    Eigen::VectorXd delta = dlogits;
    grads.W[3] += delta * trace.post_act[2].transpose();
    grads.b[3] += delta;
    Eigen::VectorXd dh = fc_[3].W.transpose() * delta;

    for (int l = 2; l >= 0; --l) {
        Eigen::VectorXd dpre_act = dh.array() * leaky_grad(trace.pre_act[l], cfg_.leaky_slope).array();
        Eigen::VectorXd dz;
        if (cfg_.normalization) {
            const Norm& n = norm_[l];
            Eigen::ArrayXd inv_std = (n.run_var.array() + cfg_.norm_eps).sqrt().inverse();
            Eigen::ArrayXd xhat = (trace.pre_norm[l] - n.run_mean).array() * inv_std;
            grads.gamma[l] += (dpre_act.array() * xhat).matrix();
            grads.beta[l] += dpre_act;
            dz = (dpre_act.array() * n.gamma.array() * inv_std).matrix();
        } else {
            dz = dpre_act;
        }
        const Eigen::VectorXd& in = l == 0 ? trace.input : trace.post_act[l - 1];
        grads.W[l] += dz * in.transpose();
        grads.b[l] += dz;
        dh = fc_[l].W.transpose() * dz;
    }
}

void PolicyNetwork::apply_update(const Gradients& grads, double lr) {
    for (int l = 0; l < 4; ++l) {
        fc_[l].W += lr * grads.W[l];
        fc_[l].b += lr * grads.b[l];
    }
    for (int l = 0; l < 3; ++l) {
        norm_[l].gamma += lr * grads.gamma[l];
        norm_[l].beta += lr * grads.beta[l];
    }
}

void PolicyNetwork::observe(const Eigen::VectorXd& feat) {
    if (!cfg_.normalization) return;
    Eigen::VectorXd h = feat;
    for (int l = 0; l < 3; ++l) {
        Eigen::VectorXd z = fc_[l].W * h + fc_[l].b;
        Norm& n = norm_[l];
        double m = cfg_.norm_momentum;
        Eigen::VectorXd dev = z - n.run_mean;
        n.run_mean += m * dev;
        n.run_var = (1.0 - m) * n.run_var + m * dev.cwiseProduct(dev);
        z = (n.gamma.array() * (z - n.run_mean).array() /
             (n.run_var.array() + cfg_.norm_eps).sqrt()).matrix() + n.beta;
        h = leaky(z, cfg_.leaky_slope);
    }
}

int PolicyNetwork::parameter_count() const {
    int n = 0;
    for (const auto& d : fc_) n += static_cast<int>(d.W.size() + d.b.size());
    for (const auto& nm : norm_) n += static_cast<int>(nm.gamma.size() + nm.beta.size());
    return n;
}

Eigen::VectorXd PolicyNetwork::parameters() const {
    Eigen::VectorXd theta(parameter_count());
    int at = 0;
    auto put = [&](const Eigen::VectorXd& v) {
        theta.segment(at, v.size()) = v;
        at += static_cast<int>(v.size());
    };
    for (const auto& d : fc_) {
        put(Eigen::Map<const Eigen::VectorXd>(d.W.data(), d.W.size()));
        put(d.b);
    }
    for (const auto& n : norm_) {
        put(n.gamma);
        put(n.beta);
    }
    return theta;
}

void PolicyNetwork::set_parameters(const Eigen::VectorXd& theta) {
    if (theta.size() != parameter_count()) throw DimensionMismatchError("parameter vector size");
    int at = 0;
    auto take = [&](Eigen::VectorXd& v) {
        v = theta.segment(at, v.size());
        at += static_cast<int>(v.size());
    };
    for (auto& d : fc_) {
        Eigen::Map<Eigen::VectorXd> w(d.W.data(), d.W.size());
        w = theta.segment(at, d.W.size());
        at += static_cast<int>(d.W.size());
        take(d.b);
    }
    for (auto& n : norm_) {
        take(n.gamma);
        take(n.beta);
    }
}

namespace {

constexpr std::uint32_t kCheckpointMagic = 0x534b4e31;  // "SKN1"

void write_vec(std::ofstream& out, const Eigen::VectorXd& v) {
    std::int64_t n = v.size();
    out.write(reinterpret_cast<const char*>(&n), sizeof(n));
    out.write(reinterpret_cast<const char*>(v.data()), n * static_cast<std::int64_t>(sizeof(double)));
}

Eigen::VectorXd read_vec(std::ifstream& in) {
    std::int64_t n = 0;
    in.read(reinterpret_cast<char*>(&n), sizeof(n));
    Eigen::VectorXd v(n);
    in.read(reinterpret_cast<char*>(v.data()), n * static_cast<std::int64_t>(sizeof(double)));
    return v;
}

}  // namespace

void PolicyNetwork::save(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot open checkpoint for write: " + path);
    out.write(reinterpret_cast<const char*>(&kCheckpointMagic), sizeof(kCheckpointMagic));
    std::int32_t dims[6] = {cfg_.input_dim, cfg_.hidden[0], cfg_.hidden[1], cfg_.hidden[2],
                            cfg_.action_dim, cfg_.normalization ? 1 : 0};
    out.write(reinterpret_cast<const char*>(dims), sizeof(dims));
    double scalars[3] = {cfg_.leaky_slope, cfg_.norm_momentum, cfg_.norm_eps};
    out.write(reinterpret_cast<const char*>(scalars), sizeof(scalars));
    for (const auto& d : fc_) {
        write_vec(out, Eigen::Map<const Eigen::VectorXd>(d.W.data(), d.W.size()));
        write_vec(out, d.b);
    }
    for (const auto& n : norm_) {
        write_vec(out, n.gamma);
        write_vec(out, n.beta);
        write_vec(out, n.run_mean);
        write_vec(out, n.run_var);
    }
}

PolicyNetwork PolicyNetwork::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open checkpoint: " + path);
    std::uint32_t magic = 0;
    in.read(reinterpret_cast<char*>(&magic), sizeof(magic));
    if (magic != kCheckpointMagic) throw ConfigError("not a checkpoint file: " + path);
    std::int32_t dims[6];
    in.read(reinterpret_cast<char*>(dims), sizeof(dims));
    double scalars[3];
    in.read(reinterpret_cast<char*>(scalars), sizeof(scalars));
    NetConfig cfg;
    cfg.input_dim = dims[0];
    cfg.hidden = {dims[1], dims[2], dims[3]};
    cfg.action_dim = dims[4];
    cfg.normalization = dims[5] != 0;
    cfg.leaky_slope = scalars[0];
    cfg.norm_momentum = scalars[1];
    cfg.norm_eps = scalars[2];
    PolicyNetwork net(cfg);
    for (auto& d : net.fc_) {
        Eigen::VectorXd w = read_vec(in);
        d.W = Eigen::Map<Eigen::MatrixXd>(w.data(), d.W.rows(), d.W.cols());
        d.b = read_vec(in);
    }
    for (auto& n : net.norm_) {
        n.gamma = read_vec(in);
        n.beta = read_vec(in);
        n.run_mean = read_vec(in);
        n.run_var = read_vec(in);
    }
    if (!in) throw ConfigError("truncated checkpoint: " + path);
    return net;
}

bool PolicyNetwork::operator==(const PolicyNetwork& o) const {
    if (parameters() != o.parameters()) return false;
    for (std::size_t l = 0; l < norm_.size(); ++l)
        if (norm_[l].run_mean != o.norm_[l].run_mean || norm_[l].run_var != o.norm_[l].run_var)
            return false;
    return true;
}

Eigen::VectorXd NetworkPolicy::action_distribution(const GameState& state, int agent) const {
    return net_->forward(features(state, agent));
}

}  // namespace skirmish
