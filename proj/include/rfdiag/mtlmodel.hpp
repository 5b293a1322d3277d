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

#ifndef RFDIAG_MTLMODEL_HPP
#define RFDIAG_MTLMODEL_HPP

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rfdiag/dataset.hpp"
#include "rfdiag/neuralnet.hpp"

namespace rfdiag {

/// Shared trunk (input -> trunk_width, ReLU) feeding `branch_count`
/// identical branches (trunk_width -> branch_widths... -> output, ReLU hidden,
/// sigmoid output). The defaults have 283716 trainable parameters.
struct MtlArchitecture {
    std::size_t input_width = 4000;
    std::size_t trunk_width = 64;
    std::vector<std::size_t> branch_widths = {64, 32, 16, 8};
    std::size_t branch_count = kComponentCount;
    std::size_t output_per_branch = 1;

    void validate() const;
    std::size_t parameter_count() const;
    std::size_t branch_parameter_count() const;

    bool operator==(const MtlArchitecture&) const = default;
};

using Probabilities = std::array<double, kComponentCount>;

struct MtlGradients {
    Gradients trunk;
    std::vector<Gradients> branches;
    std::array<double, kComponentCount> task_loss{};  // batch-mean BCE per task

    /// Same block order as MtlModel::parameter_blocks().
    std::vector<std::span<const double>> blocks() const;
};

class MtlModel {
public:
    static MtlModel build(const MtlArchitecture& arch, std::uint64_t seed);

    /// Assembles a model from explicit sub-networks; shapes are validated.
    MtlModel(MtlArchitecture arch, Mlp trunk, std::vector<Mlp> branches, std::uint64_t seed = 0);

    const MtlArchitecture& architecture() const noexcept { return arch_; }
    std::uint64_t init_seed() const noexcept { return seed_; }

    /// Ordering (filter, ps, lo, mixer). Throws std::invalid_argument on a
    /// width mismatch.
    Probabilities forward(std::span<const double> features) const;

    /// Columns are samples; returns [branch_count x batch].
    Eigen::MatrixXd forward_batch(const Eigen::MatrixXd& input) const;

    /// Gradient of the summed per-task mean BCE. `targets` is [4 x batch].
    /// When `probs` is non-null it receives the forward output.
    MtlGradients gradients(const Eigen::MatrixXd& input, const Eigen::MatrixXd& targets,
                           Eigen::MatrixXd* probs = nullptr) const;

    std::size_t parameter_count() const noexcept;

    /// Trunk blocks first, then each branch in component order.
    std::vector<std::span<double>> parameter_blocks();
    std::vector<std::span<const double>> parameter_blocks() const;

    const Mlp& trunk() const noexcept { return trunk_; }
    Mlp& trunk() noexcept { return trunk_; }
    const std::vector<Mlp>& branches() const noexcept { return branches_; }
    std::vector<Mlp>& branches() noexcept { return branches_; }

    AdamState& optimizer() noexcept { return optimizer_; }
    const AdamState& optimizer() const noexcept { return optimizer_; }

    /// Free-form JSON object describing how the weights were produced.
    const std::string& provenance() const noexcept { return provenance_; }
    void set_provenance(std::string json) { provenance_ = std::move(json); }

    bool operator==(const MtlModel& other) const;

private:
    MtlArchitecture arch_;
    Mlp trunk_;
    std::vector<Mlp> branches_;
    AdamState optimizer_;
    std::uint64_t seed_ = 0;
    std::string provenance_ = "{}";
};

struct TrainConfig {
    std::size_t epochs = 300;
    std::size_t batch_size = 64;
    double learning_rate = 1e-3;
    std::uint64_t seed = 1;
    bool shuffle = true;

    /// 300 epochs, batch 64, lr 1e-3.
    static TrainConfig desk();
    /// 10000 epochs, batch 16, lr 1e-6.
    static TrainConfig paper();

    void validate() const;
};

struct EpochRecord {
    std::size_t epoch = 0;  // 1-based
    Probabilities train_accuracy{};  // running accuracy over the epoch's batches
    Probabilities validation_accuracy{};
    Probabilities train_loss{};
    Probabilities validation_loss{};
    double total_loss = 0.0;  // summed task losses, sample-weighted over the epoch
    std::uint64_t optimizer_steps = 0;  // cumulative
};

struct TrainingHistory {
    std::vector<EpochRecord> epochs;
};

using EpochCallback = std::function<void(const EpochRecord&)>;

/// Mini-batch Adam on the summed per-task BCE. Deterministic for a fixed
/// (data, config). Throws std::invalid_argument on empty splits, width
/// mismatch or batch_size larger than the training split.
TrainingHistory train(MtlModel& model, const SampleView& train_set,
                      const SampleView& validation_set, const TrainConfig& config,
                      const EpochCallback& on_epoch = {});

/// Per-task accuracy and mean BCE over a view, evaluated in chunks.
struct Evaluation {
    Probabilities accuracy{};
    Probabilities loss{};
};
Evaluation evaluate(const MtlModel& model, const SampleView& view, double threshold = 0.5);

LabelVector binarize(const Probabilities& probs, double threshold = 0.5);
LabelVector predict(const MtlModel& model, std::span<const double> features,
                    double threshold = 0.5);
std::vector<LabelVector> predict_all(const MtlModel& model, const SampleView& view,
                                     double threshold = 0.5);

/// p * s * (a b + n (b c + c d + ... + f g)) for n branches with widths
/// (c ... f) and g outputs per branch.
std::uint64_t training_cost_estimate(std::uint64_t epochs, std::uint64_t samples,
                                     const MtlArchitecture& arch);

inline constexpr std::uint32_t kCheckpointVersion = 1;

void save_checkpoint(const MtlModel& model, const std::filesystem::path& path);
MtlModel load_checkpoint(const std::filesystem::path& path);
/// As above, and rejects checkpoints whose architecture differs from `expected`.
MtlModel load_checkpoint(const std::filesystem::path& path, const MtlArchitecture& expected);

/// Copies the listed rows of a view into a [width x rows] matrix.
Eigen::MatrixXd gather_features(const SampleView& view, std::span<const std::size_t> rows);
Eigen::MatrixXd gather_labels(const SampleView& view, std::span<const std::size_t> rows);

}  // namespace rfdiag

#endif  // RFDIAG_MTLMODEL_HPP
