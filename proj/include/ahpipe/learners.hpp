#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

namespace ahpipe {

struct MlpConfig {
    std::array<Eigen::Index, 3> hidden_sizes{256, 128, 64};  // exactly three hidden layers
    double input_noise_sigma = 0.1;
    double dropout_p = 0.3;
    bool use_batch_norm = true;
    double bn_momentum = 0.9;
    double learning_rate = 0.05;
    int epochs = 100;
    int batch_size = 32;
    uint64_t seed = 0;

    void validate() const;
};

// Feed-forward binary classifier: three hidden blocks of
// linear -> batch norm -> relu -> dropout, Gaussian noise injected at the
// input during training, sigmoid output trained with BCE.
class MlpNetwork {
public:
    struct Layer {
        Eigen::MatrixXd W;  // out x in
        Eigen::VectorXd b;
        Eigen::VectorXd gamma, beta;          // batch norm; empty when disabled
        Eigen::VectorXd run_mean, run_var;    // inference statistics
    };

    MlpNetwork(Eigen::Index input_dim, const MlpConfig& cfg, std::mt19937_64& rng);
    MlpNetwork(const nlohmann::json& j);

    Eigen::Index input_dim() const { return input_dim_; }
    const MlpConfig& config() const { return cfg_; }
    const std::vector<Layer>& layers() const { return layers_; }

    // Inference-mode probabilities, clipped to [1e-7, 1 - 1e-7].
    std::vector<double> predict(const Eigen::MatrixXd& X) const;

    // One mini-batch step: sample noise and dropout, forward with batch
    // statistics, backprop, SGD update. Returns the batch mean BCE.
    double sgd_step(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, std::mt19937_64& rng);

    // Deterministic train-mode loss and parameter gradients with noise and
    // dropout disabled; running statistics are untouched. Gradient layers
    // mirror the parameter layers (run_* fields unused).
    double loss_and_gradients(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                              std::vector<Layer>* grads) const;

    // Trainable scalars in a fixed order (W, b, gamma, beta per layer).
    static std::vector<double*> pointers_of(std::vector<Layer>& layers);
    std::vector<double*> parameter_pointers() { return pointers_of(layers_); }

    nlohmann::json to_json() const;

private:
    double forward_backward(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, bool train_mode,
                            const std::vector<Eigen::MatrixXd>* dropout_masks,
                            std::vector<Layer>* grads, bool update_running);

    MlpConfig cfg_;
    Eigen::Index input_dim_ = 0;
    std::vector<Layer> layers_;  // three hidden + output (output has no bn/relu/dropout)
};

// kind: mlp | logistic. External candidates arrive as score files and never
// pass through this interface.
class TrainedModel {
public:
    virtual ~TrainedModel() = default;
    virtual std::string kind() const = 0;
    virtual Eigen::Index feature_dim() const = 0;
    virtual std::vector<double> predict_proba(const Eigen::MatrixXd& X) const = 0;
    virtual void save(const std::string& path) const = 0;
};

struct TrainResult {
    std::unique_ptr<TrainedModel> model;
    std::vector<double> epoch_losses;  // mean training BCE per epoch
};

TrainResult train_mlp(const Eigen::MatrixXd& X, const std::vector<int>& y, const MlpConfig& cfg);

struct LogisticConfig {
    double l2 = 0.0;
    int epochs = 500;
    double learning_rate = 0.5;
    uint64_t seed = 0;
};

TrainResult train_logistic(const Eigen::MatrixXd& X, const std::vector<int>& y, const LogisticConfig& cfg);

std::unique_ptr<TrainedModel> load_model(const std::string& path);

double clip_probability(double p);

}  // namespace ahpipe
