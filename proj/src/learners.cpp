#include "ahpipe/learners.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ahpipe/error.hpp"
#include "ahpipe/json_util.hpp"
#include "ahpipe/metrics.hpp"

namespace ahpipe {

using nlohmann::json;

namespace {

constexpr double kBnEps = 1e-5;

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

void check_training_inputs(const Eigen::MatrixXd& X, const std::vector<int>& y) {
    if (static_cast<size_t>(X.rows()) != y.size()) throw_data("training: feature/label row mismatch");
    if (X.rows() < 2) throw_data("training: need at least 2 samples");
    if (!X.allFinite()) throw_numeric("training: non-finite feature value");
    bool has0 = false, has1 = false;
    for (int v : y) {
        if (v == 0) has0 = true;
        else if (v == 1) has1 = true;
        else throw_data("training: labels must be 0 or 1");
    }
    if (!has0 || !has1) throw_data("degenerate labels: both classes must be present");
}

Eigen::VectorXd to_vector(const std::vector<int>& y) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(y.size()));
    for (size_t i = 0; i < y.size(); ++i) v(static_cast<Eigen::Index>(i)) = y[i];
    return v;
}

}  // namespace

double clip_probability(double p) {
    return std::clamp(p, kProbabilityClip, 1.0 - kProbabilityClip);
}

void MlpConfig::validate() const {
    for (Eigen::Index h : hidden_sizes)
        if (h < 1) throw_data("mlp config: hidden sizes must be positive");
    if (input_noise_sigma < 0) throw_data("mlp config: noise sigma must be >= 0");
    if (dropout_p < 0 || dropout_p >= 1) throw_data("mlp config: dropout must be in [0, 1)");
    if (learning_rate <= 0) throw_data("mlp config: learning rate must be positive");
    if (epochs < 1) throw_data("mlp config: epochs must be >= 1");
    if (batch_size < 1) throw_data("mlp config: batch size must be >= 1");
    if (bn_momentum < 0 || bn_momentum >= 1) throw_data("mlp config: bn momentum must be in [0, 1)");
}

MlpNetwork::MlpNetwork(Eigen::Index input_dim, const MlpConfig& cfg, std::mt19937_64& rng)
    : cfg_(cfg), input_dim_(input_dim) {
    cfg_.validate();
    if (input_dim < 1) throw_data("mlp: input dimension must be positive");

    std::vector<Eigen::Index> dims{input_dim};
    for (Eigen::Index h : cfg.hidden_sizes) dims.push_back(h);
    dims.push_back(1);

    layers_.resize(dims.size() - 1);
    for (size_t l = 0; l < layers_.size(); ++l) {
        Eigen::Index in = dims[l], out = dims[l + 1];
        double limit = std::sqrt(6.0 / static_cast<double>(in + out));  // Glorot uniform
        std::uniform_real_distribution<double> dist(-limit, limit);
        Layer& layer = layers_[l];
        layer.W.resize(out, in);
        for (Eigen::Index r = 0; r < out; ++r)
            for (Eigen::Index c = 0; c < in; ++c) layer.W(r, c) = dist(rng);
        layer.b = Eigen::VectorXd::Zero(out);
        const bool bn = cfg_.use_batch_norm && l + 1 < layers_.size();
        if (bn) {
            layer.gamma = Eigen::VectorXd::Ones(out);
            layer.beta = Eigen::VectorXd::Zero(out);
            layer.run_mean = Eigen::VectorXd::Zero(out);
            layer.run_var = Eigen::VectorXd::Ones(out);
        }
    }
}

std::vector<double*> MlpNetwork::pointers_of(std::vector<Layer>& layers) {
    std::vector<double*> out;
    for (auto& layer : layers) {
        for (Eigen::Index i = 0; i < layer.W.size(); ++i) out.push_back(layer.W.data() + i);
        for (Eigen::Index i = 0; i < layer.b.size(); ++i) out.push_back(layer.b.data() + i);
        for (Eigen::Index i = 0; i < layer.gamma.size(); ++i) out.push_back(layer.gamma.data() + i);
        for (Eigen::Index i = 0; i < layer.beta.size(); ++i) out.push_back(layer.beta.data() + i);
    }
    return out;
}

double MlpNetwork::forward_backward(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, bool train_mode,
                                    const std::vector<Eigen::MatrixXd>* dropout_masks,
                                    std::vector<Layer>* grads, bool update_running) {
    const Eigen::Index n = X.rows();
    const size_t n_hidden = layers_.size() - 1;

    std::vector<Eigen::MatrixXd> activations;  // input to each layer
    std::vector<Eigen::MatrixXd> xhat(n_hidden), relu_in(n_hidden);
    std::vector<Eigen::VectorXd> batch_std(n_hidden);
    activations.reserve(layers_.size());
    activations.push_back(X);

    for (size_t l = 0; l < n_hidden; ++l) {
        Layer& layer = layers_[l];
        Eigen::MatrixXd z = activations.back() * layer.W.transpose();
        z.rowwise() += layer.b.transpose();

        Eigen::MatrixXd pre_relu;
        if (layer.gamma.size() > 0) {
            Eigen::VectorXd mu, var;
            if (train_mode) {
                mu = z.colwise().mean().transpose();
                var = (z.rowwise() - mu.transpose()).array().square().colwise().mean().matrix().transpose();
                if (update_running) {
                    layer.run_mean = cfg_.bn_momentum * layer.run_mean + (1.0 - cfg_.bn_momentum) * mu;
                    layer.run_var = cfg_.bn_momentum * layer.run_var + (1.0 - cfg_.bn_momentum) * var;
                }
            } else {
                mu = layer.run_mean;
                var = layer.run_var;
            }
            batch_std[l] = (var.array() + kBnEps).sqrt().matrix();
            xhat[l] = ((z.rowwise() - mu.transpose()).array().rowwise() /
                       batch_std[l].transpose().array())
                          .matrix();
            pre_relu = (xhat[l].array().rowwise() * layer.gamma.transpose().array()).matrix();
            pre_relu.rowwise() += layer.beta.transpose();
        } else {
            pre_relu = z;
        }
        relu_in[l] = pre_relu;
        Eigen::MatrixXd h = pre_relu.cwiseMax(0.0);
        if (dropout_masks && (*dropout_masks)[l].size() > 0) h = h.cwiseProduct((*dropout_masks)[l]);
        activations.push_back(std::move(h));
    }

    Layer& out_layer = layers_.back();
    Eigen::VectorXd logits = activations.back() * out_layer.W.transpose().col(0);
    logits.array() += out_layer.b(0);
    Eigen::VectorXd p(n);
    double loss = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        p(i) = sigmoid(logits(i));
        double pc = clip_probability(p(i));
        loss += y(i) > 0.5 ? -std::log(pc) : -std::log(1.0 - pc);
    }
    loss /= static_cast<double>(n);
    if (!grads) return loss;

    grads->clear();
    grads->resize(layers_.size());
    for (size_t l = 0; l < layers_.size(); ++l) {
        (*grads)[l].W = Eigen::MatrixXd::Zero(layers_[l].W.rows(), layers_[l].W.cols());
        (*grads)[l].b = Eigen::VectorXd::Zero(layers_[l].b.size());
        (*grads)[l].gamma = Eigen::VectorXd::Zero(layers_[l].gamma.size());
        (*grads)[l].beta = Eigen::VectorXd::Zero(layers_[l].beta.size());
    }

    // output layer
    Eigen::VectorXd dlogits = (p - y) / static_cast<double>(n);
    (*grads).back().W = (dlogits.transpose() * activations.back());
    (*grads).back().b(0) = dlogits.sum();
    Eigen::MatrixXd da = dlogits * out_layer.W;  // n x h_last

    for (size_t li = n_hidden; li-- > 0;) {
        Layer& layer = layers_[li];
        Layer& g = (*grads)[li];

        if (dropout_masks && (*dropout_masks)[li].size() > 0)
            da = da.cwiseProduct((*dropout_masks)[li]);

        // relu
        Eigen::MatrixXd dpre =
            (relu_in[li].array() > 0.0).select(da, Eigen::MatrixXd::Zero(da.rows(), da.cols()));

        Eigen::MatrixXd dz;
        if (layer.gamma.size() > 0) {
            const double m = static_cast<double>(n);
            g.beta = dpre.colwise().sum().transpose();
            g.gamma = (dpre.cwiseProduct(xhat[li])).colwise().sum().transpose();
            Eigen::MatrixXd dxhat =
                (dpre.array().rowwise() * layer.gamma.transpose().array()).matrix();
            if (train_mode) {
                // gradient through the batch statistics
                Eigen::VectorXd sum_dxhat = dxhat.colwise().sum().transpose();
                Eigen::VectorXd sum_dxhat_xhat =
                    (dxhat.cwiseProduct(xhat[li])).colwise().sum().transpose();
                Eigen::MatrixXd term =
                    (xhat[li].array().rowwise() * sum_dxhat_xhat.transpose().array()).matrix();
                dz = (dxhat * m).rowwise() - sum_dxhat.transpose();
                dz -= term;
                dz = (dz.array().rowwise() / (m * batch_std[li].transpose().array())).matrix();
            } else {
                dz = (dxhat.array().rowwise() / batch_std[li].transpose().array()).matrix();
            }
        } else {
            dz = dpre;
        }

        g.W = dz.transpose() * activations[li];
        g.b = dz.colwise().sum().transpose();
        if (li > 0) da = dz * layer.W;
    }
    return loss;
}

double MlpNetwork::sgd_step(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, std::mt19937_64& rng) {
    Eigen::MatrixXd input = X;
    if (cfg_.input_noise_sigma > 0.0) {
        std::normal_distribution<double> noise(0.0, cfg_.input_noise_sigma);
        for (Eigen::Index r = 0; r < input.rows(); ++r)
            for (Eigen::Index c = 0; c < input.cols(); ++c) input(r, c) += noise(rng);
    }

    std::vector<Eigen::MatrixXd> masks(layers_.size() - 1);
    if (cfg_.dropout_p > 0.0) {
        std::bernoulli_distribution keep(1.0 - cfg_.dropout_p);
        const double scale = 1.0 / (1.0 - cfg_.dropout_p);
        for (size_t l = 0; l + 1 < layers_.size(); ++l) {
            masks[l].resize(input.rows(), layers_[l].W.rows());
            for (Eigen::Index r = 0; r < masks[l].rows(); ++r)
                for (Eigen::Index c = 0; c < masks[l].cols(); ++c)
                    masks[l](r, c) = keep(rng) ? scale : 0.0;
        }
    }

    std::vector<Layer> grads;
    double loss = forward_backward(input, y, /*train_mode=*/true,
                                   cfg_.dropout_p > 0.0 ? &masks : nullptr, &grads,
                                   /*update_running=*/true);
    for (size_t l = 0; l < layers_.size(); ++l) {
        layers_[l].W -= cfg_.learning_rate * grads[l].W;
        layers_[l].b -= cfg_.learning_rate * grads[l].b;
        if (layers_[l].gamma.size() > 0) {
            layers_[l].gamma -= cfg_.learning_rate * grads[l].gamma;
            layers_[l].beta -= cfg_.learning_rate * grads[l].beta;
        }
    }
    return loss;
}

double MlpNetwork::loss_and_gradients(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                                      std::vector<Layer>* grads) const {
    // train-mode batch statistics, but no stochastic parts and no state update
    auto* self = const_cast<MlpNetwork*>(this);
    return self->forward_backward(X, y, /*train_mode=*/true, nullptr, grads, /*update_running=*/false);
}

std::vector<double> MlpNetwork::predict(const Eigen::MatrixXd& X) const {
    if (X.cols() != input_dim_) throw_data("mlp predict: feature dimension mismatch");
    Eigen::MatrixXd a = X;
    for (size_t l = 0; l + 1 < layers_.size(); ++l) {
        const Layer& layer = layers_[l];
        Eigen::MatrixXd z = a * layer.W.transpose();
        z.rowwise() += layer.b.transpose();
        if (layer.gamma.size() > 0) {
            Eigen::ArrayXd denom = (layer.run_var.array() + kBnEps).sqrt();
            z = ((z.rowwise() - layer.run_mean.transpose()).array().rowwise() / denom.transpose())
                    .matrix();
            z = (z.array().rowwise() * layer.gamma.transpose().array()).matrix();
            z.rowwise() += layer.beta.transpose();
        }
        a = z.cwiseMax(0.0);
    }
    const Layer& out_layer = layers_.back();
    Eigen::VectorXd logits = a * out_layer.W.transpose().col(0);
    logits.array() += out_layer.b(0);
    std::vector<double> p(static_cast<size_t>(X.rows()));
    for (Eigen::Index i = 0; i < logits.size(); ++i)
        p[static_cast<size_t>(i)] = clip_probability(sigmoid(logits(i)));
    return p;
}

json MlpNetwork::to_json() const {
    json layers = json::array();
    for (const auto& layer : layers_) {
        json jl{{"W", ahpipe::to_json(layer.W)}, {"b", ahpipe::to_json(layer.b)}};
        if (layer.gamma.size() > 0) {
            jl["gamma"] = ahpipe::to_json(layer.gamma);
            jl["beta"] = ahpipe::to_json(layer.beta);
            jl["run_mean"] = ahpipe::to_json(layer.run_mean);
            jl["run_var"] = ahpipe::to_json(layer.run_var);
        }
        layers.push_back(std::move(jl));
    }
    return json{{"kind", "mlp"},
                {"input_dim", input_dim_},
                {"hidden_sizes", {cfg_.hidden_sizes[0], cfg_.hidden_sizes[1], cfg_.hidden_sizes[2]}},
                {"use_batch_norm", cfg_.use_batch_norm},
                {"layers", layers}};
}

MlpNetwork::MlpNetwork(const json& j) {
    input_dim_ = j.at("input_dim").get<Eigen::Index>();
    auto hs = j.at("hidden_sizes").get<std::vector<Eigen::Index>>();
    if (hs.size() != 3) throw_data("mlp model: expected 3 hidden sizes");
    cfg_.hidden_sizes = {hs[0], hs[1], hs[2]};
    cfg_.use_batch_norm = j.at("use_batch_norm").get<bool>();
    for (const auto& jl : j.at("layers")) {
        Layer layer;
        layer.W = matrix_from_json(jl.at("W"));
        layer.b = vector_from_json(jl.at("b"));
        if (jl.contains("gamma")) {
            layer.gamma = vector_from_json(jl.at("gamma"));
            layer.beta = vector_from_json(jl.at("beta"));
            layer.run_mean = vector_from_json(jl.at("run_mean"));
            layer.run_var = vector_from_json(jl.at("run_var"));
        }
        layers_.push_back(std::move(layer));
    }
    if (layers_.size() != 4) throw_data("mlp model: expected 4 layers");
}

namespace {

class MlpModel final : public TrainedModel {
public:
    explicit MlpModel(MlpNetwork net) : net_(std::move(net)) {}
    std::string kind() const override { return "mlp"; }
    Eigen::Index feature_dim() const override { return net_.input_dim(); }
    std::vector<double> predict_proba(const Eigen::MatrixXd& X) const override {
        return net_.predict(X);
    }
    void save(const std::string& path) const override { write_json_file(path, net_.to_json()); }
    const MlpNetwork& network() const { return net_; }

private:
    MlpNetwork net_;
};

class LogisticModel final : public TrainedModel {
public:
    LogisticModel(Eigen::VectorXd w, double b) : w_(std::move(w)), b_(b) {}
    std::string kind() const override { return "logistic"; }
    Eigen::Index feature_dim() const override { return w_.size(); }
    std::vector<double> predict_proba(const Eigen::MatrixXd& X) const override {
        if (X.cols() != w_.size()) throw_data("logistic predict: feature dimension mismatch");
        Eigen::VectorXd z = X * w_;
        z.array() += b_;
        std::vector<double> p(static_cast<size_t>(X.rows()));
        for (Eigen::Index i = 0; i < z.size(); ++i)
            p[static_cast<size_t>(i)] = clip_probability(sigmoid(z(i)));
        return p;
    }
    void save(const std::string& path) const override {
        write_json_file(path, json{{"kind", "logistic"}, {"w", to_json(w_)}, {"b", b_}});
    }
    const Eigen::VectorXd& weights() const { return w_; }

private:
    Eigen::VectorXd w_;
    double b_ = 0.0;
};

}  // namespace

TrainResult train_mlp(const Eigen::MatrixXd& X, const std::vector<int>& y, const MlpConfig& cfg) {
    cfg.validate();
    check_training_inputs(X, y);
    std::mt19937_64 rng(cfg.seed);
    MlpNetwork net(X.cols(), cfg, rng);
    Eigen::VectorXd yv = to_vector(y);

    const Eigen::Index n = X.rows();
    std::vector<Eigen::Index> order(static_cast<size_t>(n));
    std::iota(order.begin(), order.end(), 0);

    TrainResult result;
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        double epoch_loss = 0.0;
        for (Eigen::Index start = 0; start < n; start += cfg.batch_size) {
            const Eigen::Index count = std::min<Eigen::Index>(cfg.batch_size, n - start);
            Eigen::MatrixXd xb(count, X.cols());
            Eigen::VectorXd yb(count);
            for (Eigen::Index i = 0; i < count; ++i) {
                xb.row(i) = X.row(order[static_cast<size_t>(start + i)]);
                yb(i) = yv(order[static_cast<size_t>(start + i)]);
            }
            epoch_loss += net.sgd_step(xb, yb, rng) * static_cast<double>(count);
        }
        result.epoch_losses.push_back(epoch_loss / static_cast<double>(n));
    }
    result.model = std::make_unique<MlpModel>(std::move(net));
    return result;
}

TrainResult train_logistic(const Eigen::MatrixXd& X, const std::vector<int>& y,
                           const LogisticConfig& cfg) {
    if (cfg.l2 < 0) throw_data("logistic: l2 must be >= 0");
    if (cfg.epochs < 1 || cfg.learning_rate <= 0) throw_data("logistic: invalid epochs or learning rate");
    check_training_inputs(X, y);
    const Eigen::Index n = X.rows();
    Eigen::VectorXd yv = to_vector(y);
    Eigen::VectorXd w = Eigen::VectorXd::Zero(X.cols());
    double b = 0.0;

    TrainResult result;
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        Eigen::VectorXd z = X * w;
        z.array() += b;
        Eigen::VectorXd p = z.unaryExpr([](double v) { return sigmoid(v); });
        Eigen::VectorXd resid = p - yv;
        Eigen::VectorXd gw = X.transpose() * resid / static_cast<double>(n) + cfg.l2 * w;
        double gb = resid.mean();
        w -= cfg.learning_rate * gw;
        b -= cfg.learning_rate * gb;

        double loss = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            double pc = clip_probability(p(i));
            loss += yv(i) > 0.5 ? -std::log(pc) : -std::log(1.0 - pc);
        }
        result.epoch_losses.push_back(loss / static_cast<double>(n));
    }
    result.model = std::make_unique<LogisticModel>(std::move(w), b);
    return result;
}

std::unique_ptr<TrainedModel> load_model(const std::string& path) {
    json j = read_json_file(path);
    const std::string kind = j.value("kind", "");
    if (kind == "mlp") return std::make_unique<MlpModel>(MlpNetwork(j));
    if (kind == "logistic")
        return std::make_unique<LogisticModel>(vector_from_json(j.at("w")), j.at("b").get<double>());
    throw_data("unknown model kind in " + path + ": '" + kind + "'");
}

}  // namespace ahpipe
