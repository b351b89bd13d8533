#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "lindec/dataset.hpp"
#include "lindec/linalg.hpp"

namespace lindec {

/// Feed-forward ReLU regression net: hidden layers ReLU, scalar affine output.
struct MlpArchitecture {
    std::size_t input_dim = 0;
    std::vector<std::size_t> hidden_layers; // may be empty (purely affine net)

    void validate() const; // ParameterError on zero widths
    // Widths of every weight layer: input -> hidden... -> 1.
    std::vector<std::size_t> layer_dims() const;
};

struct MlpLayer {
    Matrix weights; // out_dim x in_dim
    Vector bias;    // out_dim
};

struct MlpModel {
    MlpArchitecture arch;
    std::vector<MlpLayer> layers;

    void validate() const; // shape chain + finiteness
};

/// Per-layer activations kept around for backprop and diagnostics.
struct ForwardTrace {
    std::vector<Matrix> preacts;     // one per layer, n x out_dim
    std::vector<Matrix> activations; // post-ReLU (last layer: identity)
    Vector predictions;              // n
};

struct LayerGradients {
    Matrix weights;
    Vector bias;
};

struct Gradients {
    std::vector<LayerGradients> layers;
};

struct AdamState {
    std::vector<LayerGradients> first_moment;
    std::vector<LayerGradients> second_moment;
    std::uint64_t step = 0;
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;

    static AdamState init(const MlpModel& model, double lr, double beta1, double beta2,
                          double eps);
};

struct TrainConfig {
    std::size_t epochs = 200;
    std::size_t batch_size = 32;
    double lr = 1e-3;
    std::uint64_t seed = 0;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps_adam = 1e-8;

    void validate() const;
};

struct TrainResult {
    MlpModel model;
    Vector epoch_loss; // mean batch MSE per epoch
};

/// He-style scaled uniform weights (+-sqrt(6/fan_in)), zero biases.
/// Deterministic given seed.
MlpModel init_mlp(const MlpArchitecture& arch, std::uint64_t seed);

Vector forward(const MlpModel& m, const Matrix& x);
ForwardTrace forward_trace(const MlpModel& m, const Matrix& x);

/// Mean squared error over the batch plus reverse-mode gradients.
/// ReLU subgradient at exactly 0 is 0.
std::pair<double, Gradients> loss_and_gradients(const MlpModel& m, const Matrix& x,
                                                const Vector& y);

/// Standard Adam recurrence with bias correction; increments state.step.
void adam_step(AdamState& state, MlpModel& m, const Gradients& grads);

/// Seeded mini-batch training; records mean batch loss per epoch.
/// batch_size larger than the dataset is clamped with a warning on stderr.
TrainResult train_mlp(const MlpArchitecture& arch, const Dataset& train, const TrainConfig& cfg);

/// Versioned JSON round trip for reproducibility.
std::string dump_model_json(const MlpModel& m);
MlpModel load_model_json(const std::string& text);

} // namespace lindec
