#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "emml/matrix.hpp"

namespace emml {

// Dense feed-forward regressor: ReLU on every layer, including the width-1
// output (the target is nonnegative), trained with MAE loss and Adam.
struct MlpArchitecture {
    std::vector<std::size_t> layer_widths; // input width first, 1 last
};

// [d, 128, 512, 512, 512, 256, 256, 1]
MlpArchitecture default_architecture(std::size_t input_width);

void validate_architecture(const MlpArchitecture& arch);

// Sum over layers of in*out + out.
std::size_t count_parameters(const MlpArchitecture& arch);

struct MlpModel {
    std::vector<Matrix> weights;           // per layer, [in x out]
    std::vector<std::vector<double>> biases; // per layer, [out]

    std::size_t input_width() const { return weights.empty() ? 0 : weights.front().rows(); }
    std::size_t layer_count() const { return weights.size(); }
};

// Weights ~ Normal(0, 2/in_width) per layer from a seeded RNG, biases zero.
MlpModel he_init(const MlpArchitecture& arch, std::uint64_t seed);

struct ForwardCache {
    std::vector<Matrix> activations;     // activations[0] is the input batch
    std::vector<Matrix> pre_activations; // z per layer, before ReLU
};

// Batched forward pass; fills the cache (when given) for the backward pass.
std::vector<double> forward(const MlpModel& model, const Matrix& x, ForwardCache* cache = nullptr);

struct Gradients {
    std::vector<Matrix> weights;
    std::vector<std::vector<double>> biases;
};

// MAE loss with sign(0) = 0; ReLU passes gradient only where the
// pre-activation is strictly positive. Returns the batch loss.
double loss_and_grad(const MlpModel& model, const Matrix& x, std::span<const double> y,
                     Gradients& grads);

struct AdamState {
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    double learning_rate = 0.001;
    long long t = 0;
    std::vector<Matrix> m_weights, v_weights;
    std::vector<std::vector<double>> m_biases, v_biases;

    static AdamState for_model(const MlpModel& model, double learning_rate = 0.001);
};

// One optimizer step over every parameter tensor; t advances by exactly 1.
void adam_step(MlpModel& model, const Gradients& grads, AdamState& state);

struct TrainConfig {
    int epochs = 500;
    int batch_size = 128;
    double validation_split = 0.2;
    double learning_rate = 0.001;
    std::uint64_t seed = 42;
};

struct TrainResult {
    std::vector<double> train_mae; // running mean of batch losses, one per epoch
    std::vector<double> val_mae;   // NaN when validation_split == 0
    std::vector<std::size_t> validation_indices;
    bool dead_output_warning = false; // all outputs exactly 0 after the first epoch
};

// Holds out the last validation_split fraction of a seeded shuffle, then
// trains the remaining rows in re-shuffled mini-batches (final short batch
// kept), one adam_step per batch. Validation rows never contribute gradients.
TrainResult train(MlpModel& model, const Matrix& x, std::span<const double> y,
                  const TrainConfig& config);

} // namespace emml
