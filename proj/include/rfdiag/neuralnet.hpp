/*
 * Copyright 2026 The rfdiag Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef RFDIAG_NEURALNET_HPP
#define RFDIAG_NEURALNET_HPP

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace rfdiag {

class Rng;

enum class Activation : std::uint32_t { ReLU = 0, Sigmoid = 1, Identity = 2 };

/// Fully connected layer, out = act(W x + b). W is [out x in].
struct DenseLayer {
    Eigen::MatrixXd weights;
    Eigen::VectorXd biases;
    Activation activation = Activation::Identity;

    std::size_t in_dim() const noexcept { return static_cast<std::size_t>(weights.cols()); }
    std::size_t out_dim() const noexcept { return static_cast<std::size_t>(weights.rows()); }
    std::size_t parameter_count() const noexcept { return in_dim() * out_dim() + out_dim(); }

    /// Glorot-uniform weights in +-sqrt(6 / (in + out)), zero biases.
    static DenseLayer glorot(std::size_t in, std::size_t out, Activation act, Rng& rng);
    static DenseLayer zeros(std::size_t in, std::size_t out, Activation act);
};

struct DenseOutput {
    Eigen::VectorXd pre_activation;
    Eigen::VectorXd output;
};

/// Single-sample forward. Throws std::invalid_argument on a width mismatch.
DenseOutput dense_forward(const DenseLayer& layer, const Eigen::VectorXd& input);

/// Element-wise activation. ReLU'(0) is taken as 0.
Eigen::MatrixXd activate(Activation act, const Eigen::MatrixXd& pre);

/// dL/d(pre) from dL/d(out), given the cached pre-activation and output.
Eigen::MatrixXd activation_backward(Activation act, const Eigen::MatrixXd& pre,
                                    const Eigen::MatrixXd& out, const Eigen::MatrixXd& grad_out);

inline constexpr double kBceClamp = 1e-7;

/// -(y ln p + (1-y) ln(1-p)) with p clamped to [1e-7, 1 - 1e-7].
double bce_loss(double p, double y);

/// Sum over output rows of the batch-mean BCE. Columns are samples.
double mean_bce(const Eigen::MatrixXd& probs, const Eigen::MatrixXd& targets);

/// Gradient of mean_bce with respect to the pre-activation of sigmoid
/// outputs: (p - y) / batch.
Eigen::MatrixXd bce_sigmoid_delta(const Eigen::MatrixXd& probs, const Eigen::MatrixXd& targets);

struct LayerGradient {
    Eigen::MatrixXd weights;
    Eigen::VectorXd biases;
};
using Gradients = std::vector<LayerGradient>;

/// A stack of dense layers. Batch inputs are [features x batch] matrices.
class Mlp {
public:
    struct Cache {
        std::vector<Eigen::MatrixXd> inputs;          // input to each layer
        std::vector<Eigen::MatrixXd> pre_activations; // W x + b per layer
        Eigen::MatrixXd output;
    };

    Mlp() = default;
    explicit Mlp(std::vector<DenseLayer> layers);

    /// widths = {in, h1, ..., out}; hidden layers use `hidden`, the last `output`.
    static Mlp glorot(std::span<const std::size_t> widths, Activation hidden, Activation output,
                      Rng& rng);

    Eigen::MatrixXd forward(const Eigen::MatrixXd& input) const;
    Cache forward_cached(const Eigen::MatrixXd& input) const;

    /// Reverse pass from `output_delta` = dL/d(pre-activation of the last
    /// layer). When `input_grad` is non-null it receives dL/d(input).
    Gradients backward(const Cache& cache, const Eigen::MatrixXd& output_delta,
                       Eigen::MatrixXd* input_grad = nullptr) const;

    std::size_t in_dim() const;
    std::size_t out_dim() const;
    std::size_t parameter_count() const noexcept;

    const std::vector<DenseLayer>& layers() const noexcept { return layers_; }
    std::vector<DenseLayer>& layers() noexcept { return layers_; }

    /// Per layer: weights (column-major) then biases.
    std::vector<std::span<double>> parameter_blocks();
    std::vector<std::span<const double>> parameter_blocks() const;

    bool operator==(const Mlp& other) const;

private:
    std::vector<DenseLayer> layers_;
};

std::size_t param_count(const Mlp& network);

/// Gradient of mean_bce for a network with sigmoid outputs.
Gradients backward(const Mlp& network, const Eigen::MatrixXd& input,
                   const Eigen::MatrixXd& targets);

std::vector<std::span<const double>> gradient_blocks(const Gradients& g);

struct AdamConfig {
    double learning_rate = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

/// Moments are flat over every parameter handed to adam_step, in block order.
struct AdamState {
    AdamConfig config{};
    std::vector<double> first_moment;
    std::vector<double> second_moment;
    std::uint64_t step_count = 0;

    AdamState() = default;
    AdamState(AdamConfig cfg, std::size_t parameter_count)
        : config(cfg), first_moment(parameter_count, 0.0), second_moment(parameter_count, 0.0) {}
};

/// One bias-corrected Adam update over a list of parameter blocks. Throws
/// std::invalid_argument when the block shapes disagree with each other or
/// with the state.
void adam_step(std::span<const std::span<double>> params,
               std::span<const std::span<const double>> grads, AdamState& state);

void adam_step(std::span<double> params, std::span<const double> grads, AdamState& state);

struct GradCheckOptions {
    double step = 1e-5;
    /// Fault injection: scale the analytic gradient of this flat parameter.
    std::optional<std::size_t> perturb_index;
    double perturb_factor = 1.01;
};

struct GradCheckResult {
    double max_relative_error = 0.0;
    std::size_t worst_index = 0;
    std::size_t checked = 0;
};

/// Central finite differences against backward() over every parameter.
/// Relative error is |a - n| / max(|a|, |n|, 1e-8).
GradCheckResult grad_check(const Mlp& network, const Eigen::MatrixXd& input,
                           const Eigen::MatrixXd& targets, const GradCheckOptions& options = {});

}  // namespace rfdiag

#endif  // RFDIAG_NEURALNET_HPP
