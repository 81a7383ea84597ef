#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "rlab/matrix.hpp"

namespace rlab {

enum class Activation { Relu, Tanh, Heaviside, Identity };

std::string activation_name(Activation a);
Activation activation_from_name(const std::string& name);

/// Dense feedforward scorer. Hidden layers share one activation, the output
/// layer emits raw scores. A last layer of width 1 is the binary case: the
/// classifier is sgn(score) with sgn(0) = +1, stored as class index {0, 1}.
struct Network {
    std::vector<int> layer_dims;      // [d, h1, ..., C]
    std::vector<Matrix> weights;      // layer l: (dims[l+1] x dims[l])
    std::vector<std::vector<double>> biases;
    Activation activation = Activation::Relu;
    std::uint64_t seed = 0;

    int input_dim() const { return layer_dims.front(); }
    int output_dim() const { return layer_dims.back(); }
    std::size_t num_layers() const { return weights.size(); }
    bool binary() const { return layer_dims.back() == 1; }
    long param_count() const;
};

// weights ~ uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)), biases zero
Network init_network(const std::vector<int>& layer_dims, Activation activation,
                     std::uint64_t seed);

std::vector<double> forward(const Network& net, std::span<const double> x);

// Lowest index wins ties.
int argmax_index(std::span<const double> scores);

// Class index in [0, C). Binary nets map score >= 0 to class 1 (sgn(0) = +1).
int predict_label(const Network& net, std::span<const double> x);
int label_from_scores(const Network& net, std::span<const double> scores);

// +1 / -1 for a binary score, with sgn(0) = +1.
inline double sign_convention(double score) { return score >= 0.0 ? 1.0 : -1.0; }

enum class LossKind { CrossEntropy, Hinge };

struct GradOptions {
    bool heaviside_surrogate = true;   // surrogate only affects gradients
    double surrogate_temperature = 10.0;
};

struct Gradients {
    std::vector<Matrix> weights;
    std::vector<std::vector<double>> biases;
};

// Exact analytic gradient of the mean batch loss. Throws std::domain_error
// for Heaviside activations when the surrogate is disabled.
Gradients grad_weights(const Network& net, const Matrix& batch_inputs,
                       const std::vector<int>& batch_labels, LossKind loss,
                       const GradOptions& opts = {});

// Gradient w.r.t. the input of the scalar functional coeffs . g(x).
std::vector<double> grad_input(const Network& net, std::span<const double> x,
                               std::span<const double> score_coeffs,
                               const GradOptions& opts = {});

double batch_loss(const Network& net, const Matrix& inputs,
                  const std::vector<int>& labels, LossKind loss);

double accuracy(const Network& net, const Matrix& inputs,
                const std::vector<int>& labels);

enum class Optimizer { Sgd, Adam };

struct TrainConfig {
    Optimizer optimizer = Optimizer::Adam;
    double learning_rate = 1e-3;
    int batch_size = 256;
    int max_epochs = 100;
    double target_train_accuracy = 0.99;
    LossKind loss = LossKind::CrossEntropy;
    std::uint64_t seed = 0;
    GradOptions grad;
};

struct TrainResult {
    Network net;
    int epochs = 0;
    double final_train_acc = 0.0;
    bool reached_target = false;
    bool diverged = false;
};

struct LabeledDataset;  // data module

// Mini-batch training, deterministic per (net seed, config, data). Stops at
// the first epoch whose full-train accuracy reaches the target, or at
// max_epochs. A NaN loss aborts the run with diverged = true.
TrainResult train(Network net, const LabeledDataset& data, const TrainConfig& cfg);

}  // namespace rlab
