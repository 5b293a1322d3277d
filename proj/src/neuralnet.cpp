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

#include "rfdiag/neuralnet.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "rfdiag/random.hpp"

namespace rfdiag {
namespace {

double sigmoid(double z) {
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

void check_same_shape(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, const char* what) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw std::invalid_argument(std::string(what) + ": shape mismatch");
}

}  // namespace

DenseLayer DenseLayer::glorot(std::size_t in, std::size_t out, Activation act, Rng& rng) {
    DenseLayer layer = zeros(in, out, act);
    const double limit = std::sqrt(6.0 / static_cast<double>(in + out));
    // Row-major fill order so the draw sequence reads like W[i][j].
    for (Eigen::Index i = 0; i < layer.weights.rows(); ++i)
        for (Eigen::Index j = 0; j < layer.weights.cols(); ++j)
            layer.weights(i, j) = rng.uniform(-limit, limit);
    return layer;
}

DenseLayer DenseLayer::zeros(std::size_t in, std::size_t out, Activation act) {
    if (in == 0 || out == 0) throw std::invalid_argument("DenseLayer: zero width");
    return {Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(out), static_cast<Eigen::Index>(in)),
            Eigen::VectorXd::Zero(static_cast<Eigen::Index>(out)), act};
}

Eigen::MatrixXd activate(Activation act, const Eigen::MatrixXd& pre) {
    switch (act) {
        case Activation::ReLU: return pre.cwiseMax(0.0);
        case Activation::Sigmoid: return pre.unaryExpr([](double z) { return sigmoid(z); });
        case Activation::Identity: return pre;
    }
    throw std::invalid_argument("unknown activation");
}

Eigen::MatrixXd activation_backward(Activation act, const Eigen::MatrixXd& pre,
                                    const Eigen::MatrixXd& out, const Eigen::MatrixXd& grad_out) {
    switch (act) {
        case Activation::ReLU:
            return (pre.array() > 0.0).select(grad_out, 0.0);
        case Activation::Sigmoid:
            return grad_out.cwiseProduct(out.cwiseProduct((1.0 - out.array()).matrix()));
        case Activation::Identity: return grad_out;
    }
    throw std::invalid_argument("unknown activation");
}

DenseOutput dense_forward(const DenseLayer& layer, const Eigen::VectorXd& input) {
    if (static_cast<std::size_t>(input.size()) != layer.in_dim())
        throw std::invalid_argument("dense_forward: input width " + std::to_string(input.size()) +
                                    ", layer expects " + std::to_string(layer.in_dim()));
    DenseOutput out;
    out.pre_activation = layer.weights * input + layer.biases;
    out.output = activate(layer.activation, out.pre_activation);
    return out;
}

double bce_loss(double p, double y) {
    const double q = std::clamp(p, kBceClamp, 1.0 - kBceClamp);
    return -(y * std::log(q) + (1.0 - y) * std::log(1.0 - q));
}

double mean_bce(const Eigen::MatrixXd& probs, const Eigen::MatrixXd& targets) {
    check_same_shape(probs, targets, "mean_bce");
    if (probs.cols() == 0) throw std::invalid_argument("mean_bce: empty batch");
    double total = 0.0;
    for (Eigen::Index j = 0; j < probs.cols(); ++j)
        for (Eigen::Index i = 0; i < probs.rows(); ++i) total += bce_loss(probs(i, j), targets(i, j));
    return total / static_cast<double>(probs.cols());
}

Eigen::MatrixXd bce_sigmoid_delta(const Eigen::MatrixXd& probs, const Eigen::MatrixXd& targets) {
    check_same_shape(probs, targets, "bce_sigmoid_delta");
    return (probs - targets) / static_cast<double>(probs.cols());
}

Mlp::Mlp(std::vector<DenseLayer> layers) : layers_(std::move(layers)) {
    if (layers_.empty()) throw std::invalid_argument("Mlp: no layers");
    for (std::size_t l = 1; l < layers_.size(); ++l)
        if (layers_[l].in_dim() != layers_[l - 1].out_dim())
            throw std::invalid_argument("Mlp: layer " + std::to_string(l) + " expects width " +
                                        std::to_string(layers_[l].in_dim()) + ", previous gives " +
                                        std::to_string(layers_[l - 1].out_dim()));
}

Mlp Mlp::glorot(std::span<const std::size_t> widths, Activation hidden, Activation output,
                Rng& rng) {
    if (widths.size() < 2) throw std::invalid_argument("Mlp::glorot: need at least two widths");
    std::vector<DenseLayer> layers;
    for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
        const bool last = l + 2 == widths.size();
        layers.push_back(DenseLayer::glorot(widths[l], widths[l + 1], last ? output : hidden, rng));
    }
    return Mlp(std::move(layers));
}

Eigen::MatrixXd Mlp::forward(const Eigen::MatrixXd& input) const {
    if (static_cast<std::size_t>(input.rows()) != in_dim())
        throw std::invalid_argument("Mlp::forward: input width " + std::to_string(input.rows()) +
                                    ", expected " + std::to_string(in_dim()));
    Eigen::MatrixXd x = input;
    for (const auto& layer : layers_) {
        Eigen::MatrixXd pre = layer.weights * x;
        pre.colwise() += layer.biases;
        x = activate(layer.activation, pre);
    }
    return x;
}

Mlp::Cache Mlp::forward_cached(const Eigen::MatrixXd& input) const {
    if (static_cast<std::size_t>(input.rows()) != in_dim())
        throw std::invalid_argument("Mlp::forward_cached: input width " +
                                    std::to_string(input.rows()) + ", expected " +
                                    std::to_string(in_dim()));
    Cache cache;
    cache.inputs.reserve(layers_.size());
    cache.pre_activations.reserve(layers_.size());
    Eigen::MatrixXd x = input;
    for (const auto& layer : layers_) {
        Eigen::MatrixXd pre = layer.weights * x;
        pre.colwise() += layer.biases;
        Eigen::MatrixXd out = activate(layer.activation, pre);
        cache.inputs.push_back(std::move(x));
        cache.pre_activations.push_back(std::move(pre));
        x = std::move(out);
    }
    cache.output = std::move(x);
    return cache;
}

Gradients Mlp::backward(const Cache& cache, const Eigen::MatrixXd& output_delta,
                        Eigen::MatrixXd* input_grad) const {
    if (cache.inputs.size() != layers_.size())
        throw std::invalid_argument("Mlp::backward: cache does not match network depth");
    check_same_shape(output_delta, cache.pre_activations.back(), "Mlp::backward");

    Gradients grads(layers_.size());
    Eigen::MatrixXd delta = output_delta;
    for (std::size_t l = layers_.size(); l-- > 0;) {
        const auto& layer = layers_[l];
        grads[l].weights.noalias() = delta * cache.inputs[l].transpose();
        grads[l].biases = delta.rowwise().sum();
        if (l == 0 && input_grad == nullptr) break;
        Eigen::MatrixXd g_in = layer.weights.transpose() * delta;
        if (l == 0) {
            *input_grad = std::move(g_in);
            break;
        }
        delta = activation_backward(layers_[l - 1].activation, cache.pre_activations[l - 1],
                                    cache.inputs[l], g_in);
    }
    return grads;
}

std::size_t Mlp::in_dim() const {
    if (layers_.empty()) throw std::logic_error("Mlp: empty network");
    return layers_.front().in_dim();
}

std::size_t Mlp::out_dim() const {
    if (layers_.empty()) throw std::logic_error("Mlp: empty network");
    return layers_.back().out_dim();
}

std::size_t Mlp::parameter_count() const noexcept {
    std::size_t n = 0;
    for (const auto& layer : layers_) n += layer.parameter_count();
    return n;
}

std::vector<std::span<double>> Mlp::parameter_blocks() {
    std::vector<std::span<double>> blocks;
    for (auto& layer : layers_) {
        blocks.emplace_back(layer.weights.data(), static_cast<std::size_t>(layer.weights.size()));
        blocks.emplace_back(layer.biases.data(), static_cast<std::size_t>(layer.biases.size()));
    }
    return blocks;
}

std::vector<std::span<const double>> Mlp::parameter_blocks() const {
    std::vector<std::span<const double>> blocks;
    for (const auto& layer : layers_) {
        blocks.emplace_back(layer.weights.data(), static_cast<std::size_t>(layer.weights.size()));
        blocks.emplace_back(layer.biases.data(), static_cast<std::size_t>(layer.biases.size()));
    }
    return blocks;
}

bool Mlp::operator==(const Mlp& other) const {
    if (layers_.size() != other.layers_.size()) return false;
    for (std::size_t l = 0; l < layers_.size(); ++l) {
        const auto& a = layers_[l];
        const auto& b = other.layers_[l];
        if (a.activation != b.activation || a.weights.rows() != b.weights.rows() ||
            a.weights.cols() != b.weights.cols() || a.weights != b.weights || a.biases != b.biases)
            return false;
    }
    return true;
}

std::size_t param_count(const Mlp& network) { return network.parameter_count(); }

Gradients backward(const Mlp& network, const Eigen::MatrixXd& input,
                   const Eigen::MatrixXd& targets) {
    if (network.layers().back().activation != Activation::Sigmoid)
        throw std::invalid_argument("backward: BCE requires sigmoid outputs");
    const auto cache = network.forward_cached(input);
    return network.backward(cache, bce_sigmoid_delta(cache.output, targets));
}

std::vector<std::span<const double>> gradient_blocks(const Gradients& g) {
    std::vector<std::span<const double>> blocks;
    for (const auto& lg : g) {
        blocks.emplace_back(lg.weights.data(), static_cast<std::size_t>(lg.weights.size()));
        blocks.emplace_back(lg.biases.data(), static_cast<std::size_t>(lg.biases.size()));
    }
    return blocks;
}

void adam_step(std::span<const std::span<double>> params,
               std::span<const std::span<const double>> grads, AdamState& state) {
    if (params.size() != grads.size())
        throw std::invalid_argument("adam_step: parameter/gradient block count mismatch");
    std::size_t total = 0;
    for (std::size_t b = 0; b < params.size(); ++b) {
        if (params[b].size() != grads[b].size())
            throw std::invalid_argument("adam_step: block " + std::to_string(b) +
                                        " shape mismatch");
        total += params[b].size();
    }
    if (state.first_moment.size() != total || state.second_moment.size() != total)
        throw std::invalid_argument("adam_step: state holds " +
                                    std::to_string(state.first_moment.size()) +
                                    " moments for " + std::to_string(total) + " parameters");

    const auto& c = state.config;
    state.step_count += 1;
    const double t = static_cast<double>(state.step_count);
    const double correction1 = 1.0 - std::pow(c.beta1, t);
    const double correction2 = 1.0 - std::pow(c.beta2, t);

    using Array = Eigen::Map<Eigen::ArrayXd>;
    using ConstArray = Eigen::Map<const Eigen::ArrayXd>;
    std::size_t offset = 0;
    for (std::size_t b = 0; b < params.size(); ++b) {
        const auto n = static_cast<Eigen::Index>(params[b].size());
        Array p(params[b].data(), n);
        const ConstArray g(grads[b].data(), n);
        Array m(state.first_moment.data() + offset, n);
        Array v(state.second_moment.data() + offset, n);
        m = c.beta1 * m + (1.0 - c.beta1) * g;
        v = c.beta2 * v + (1.0 - c.beta2) * g * g;
        p -= c.learning_rate * (m / correction1) / ((v / correction2).sqrt() + c.epsilon);
        offset += params[b].size();
    }
}

void adam_step(std::span<double> params, std::span<const double> grads, AdamState& state) {
    const std::span<double> p[] = {params};
    const std::span<const double> g[] = {grads};
    adam_step(std::span<const std::span<double>>(p), std::span<const std::span<const double>>(g),
              state);
}

GradCheckResult grad_check(const Mlp& network, const Eigen::MatrixXd& input,
                           const Eigen::MatrixXd& targets, const GradCheckOptions& options) {
    const Gradients analytic = backward(network, input, targets);
    const auto analytic_blocks = gradient_blocks(analytic);

    Mlp probe = network;
    auto blocks = probe.parameter_blocks();
    const double h = options.step;

    GradCheckResult result;
    std::size_t flat = 0;
    for (std::size_t b = 0; b < blocks.size(); ++b) {
        for (std::size_t i = 0; i < blocks[b].size(); ++i, ++flat) {
            double& w = blocks[b][i];
            const double saved = w;
            w = saved + h;
            const double plus = mean_bce(probe.forward(input), targets);
            w = saved - h;
            const double minus = mean_bce(probe.forward(input), targets);
            w = saved;

            const double numeric = (plus - minus) / (2.0 * h);
            double a = analytic_blocks[b][i];
            if (options.perturb_index && *options.perturb_index == flat) a *= options.perturb_factor;
            const double denom = std::max({std::abs(a), std::abs(numeric), 1e-8});
            const double rel = std::abs(a - numeric) / denom;
            if (rel > result.max_relative_error) {
                result.max_relative_error = rel;
                result.worst_index = flat;
            }
        }
    }
    result.checked = flat;
    return result;
}

}  // namespace rfdiag
