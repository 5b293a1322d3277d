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

#include "rfdiag/mtlmodel.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <stdexcept>

#include <json.hpp>

#include "rfdiag/binary_io.hpp"
#include "rfdiag/random.hpp"

namespace rfdiag {
namespace {

constexpr std::uint64_t kInitStream = 0x494E4954;     // "INIT"
constexpr std::uint64_t kShuffleStream = 0x53485546;  // "SHUF"
constexpr char kMagic[4] = {'R', 'F', 'M', '1'};
constexpr std::size_t kEvalChunk = 512;

std::vector<std::size_t> branch_chain(const MtlArchitecture& a) {
    std::vector<std::size_t> widths{a.trunk_width};
    widths.insert(widths.end(), a.branch_widths.begin(), a.branch_widths.end());
    widths.push_back(a.output_per_branch);
    return widths;
}

nlohmann::json arch_json(const MtlArchitecture& a) {
    return {{"input_width", a.input_width},
            {"trunk_width", a.trunk_width},
            {"branch_widths", a.branch_widths},
            {"branch_count", a.branch_count},
            {"output_per_branch", a.output_per_branch}};
}

MtlArchitecture arch_from_json(const nlohmann::json& j) {
    MtlArchitecture a;
    a.input_width = j.at("input_width").get<std::size_t>();
    a.trunk_width = j.at("trunk_width").get<std::size_t>();
    a.branch_widths = j.at("branch_widths").get<std::vector<std::size_t>>();
    a.branch_count = j.at("branch_count").get<std::size_t>();
    a.output_per_branch = j.at("output_per_branch").get<std::size_t>();
    return a;
}

void check_view(const SampleView& v, std::size_t width, const char* what) {
    if (v.empty()) throw std::invalid_argument(std::string(what) + " set is empty");
    if (v.feature_width != width)
        throw std::invalid_argument(std::string(what) + " set has feature width " +
                                    std::to_string(v.feature_width) + ", model expects " +
                                    std::to_string(width));
}

}  // namespace

void MtlArchitecture::validate() const {
    if (input_width == 0 || trunk_width == 0)
        throw std::invalid_argument("architecture: zero input or trunk width");
    if (std::find(branch_widths.begin(), branch_widths.end(), 0U) != branch_widths.end())
        throw std::invalid_argument("architecture: zero branch width");
    if (branch_count != kComponentCount || output_per_branch != 1)
        throw std::invalid_argument("architecture: need " + std::to_string(kComponentCount) +
                                    " single-output branches, one per component");
}

std::size_t MtlArchitecture::branch_parameter_count() const {
    const auto w = branch_chain(*this);
    std::size_t n = 0;
    for (std::size_t i = 0; i + 1 < w.size(); ++i) n += w[i] * w[i + 1] + w[i + 1];
    return n;
}

std::size_t MtlArchitecture::parameter_count() const {
    return input_width * trunk_width + trunk_width + branch_count * branch_parameter_count();
}

std::vector<std::span<const double>> MtlGradients::blocks() const {
    auto out = gradient_blocks(trunk);
    for (const auto& b : branches) {
        const auto more = gradient_blocks(b);
        out.insert(out.end(), more.begin(), more.end());
    }
    return out;
}

MtlModel MtlModel::build(const MtlArchitecture& arch, std::uint64_t seed) {
    arch.validate();
    Rng rng(seed, kInitStream);
    const std::size_t trunk_widths[] = {arch.input_width, arch.trunk_width};
    Mlp trunk = Mlp::glorot(trunk_widths, Activation::ReLU, Activation::ReLU, rng);
    const auto chain = branch_chain(arch);
    std::vector<Mlp> branches;
    for (std::size_t k = 0; k < arch.branch_count; ++k)
        branches.push_back(Mlp::glorot(chain, Activation::ReLU, Activation::Sigmoid, rng));
    return MtlModel(arch, std::move(trunk), std::move(branches), seed);
}

MtlModel::MtlModel(MtlArchitecture arch, Mlp trunk, std::vector<Mlp> branches, std::uint64_t seed)
    : arch_(std::move(arch)), trunk_(std::move(trunk)), branches_(std::move(branches)), seed_(seed) {
    arch_.validate();
    if (trunk_.layers().size() != 1 || trunk_.in_dim() != arch_.input_width ||
        trunk_.out_dim() != arch_.trunk_width)
        throw std::invalid_argument("MtlModel: trunk does not match the architecture");
    if (branches_.size() != arch_.branch_count)
        throw std::invalid_argument("MtlModel: wrong number of branches");
    const auto chain = branch_chain(arch_);
    for (const auto& b : branches_) {
        if (b.layers().size() + 1 != chain.size())
            throw std::invalid_argument("MtlModel: branch depth does not match the architecture");
        for (std::size_t l = 0; l < b.layers().size(); ++l)
            if (b.layers()[l].in_dim() != chain[l] || b.layers()[l].out_dim() != chain[l + 1])
                throw std::invalid_argument("MtlModel: branch layer " + std::to_string(l) +
                                            " has the wrong shape");
        if (b.layers().back().activation != Activation::Sigmoid)
            throw std::invalid_argument("MtlModel: branch outputs must be sigmoid");
    }
}

Probabilities MtlModel::forward(std::span<const double> features) const {
    if (features.size() != arch_.input_width)
        throw std::invalid_argument("MtlModel::forward: got " + std::to_string(features.size()) +
                                    " features, expected " + std::to_string(arch_.input_width));
    const Eigen::Map<const Eigen::VectorXd> x(features.data(),
                                              static_cast<Eigen::Index>(features.size()));
    const Eigen::MatrixXd probs = forward_batch(x);
    Probabilities out{};
    for (std::size_t k = 0; k < kComponentCount; ++k) out[k] = probs(static_cast<Eigen::Index>(k), 0);
    return out;
}

Eigen::MatrixXd MtlModel::forward_batch(const Eigen::MatrixXd& input) const {
    if (static_cast<std::size_t>(input.rows()) != arch_.input_width)
        throw std::invalid_argument("MtlModel::forward_batch: input width " +
                                    std::to_string(input.rows()) + ", expected " +
                                    std::to_string(arch_.input_width));
    const Eigen::MatrixXd shared = trunk_.forward(input);  // computed once for all branches
    Eigen::MatrixXd out(static_cast<Eigen::Index>(branches_.size()), input.cols());
    for (std::size_t k = 0; k < branches_.size(); ++k)
        out.row(static_cast<Eigen::Index>(k)) = branches_[k].forward(shared);
    return out;
}

MtlGradients MtlModel::gradients(const Eigen::MatrixXd& input, const Eigen::MatrixXd& targets,
                                 Eigen::MatrixXd* probs) const {
    if (targets.rows() != static_cast<Eigen::Index>(branches_.size()) ||
        targets.cols() != input.cols())
        throw std::invalid_argument("MtlModel::gradients: targets must be [4 x batch]");

    const auto trunk_cache = trunk_.forward_cached(input);
    const Eigen::MatrixXd& shared = trunk_cache.output;

    MtlGradients g;
    g.branches.reserve(branches_.size());
    Eigen::MatrixXd shared_grad = Eigen::MatrixXd::Zero(shared.rows(), shared.cols());
    if (probs) probs->resize(static_cast<Eigen::Index>(branches_.size()), input.cols());

    for (std::size_t k = 0; k < branches_.size(); ++k) {
        const auto cache = branches_[k].forward_cached(shared);
        const Eigen::MatrixXd y = targets.row(static_cast<Eigen::Index>(k));
        g.task_loss[k] = mean_bce(cache.output, y);
        Eigen::MatrixXd branch_input_grad;
        g.branches.push_back(
            branches_[k].backward(cache, bce_sigmoid_delta(cache.output, y), &branch_input_grad));
        shared_grad += branch_input_grad;
        if (probs) probs->row(static_cast<Eigen::Index>(k)) = cache.output;
    }

    const Eigen::MatrixXd trunk_delta =
        activation_backward(Activation::ReLU, trunk_cache.pre_activations.front(), shared,
                            shared_grad);
    g.trunk = trunk_.backward(trunk_cache, trunk_delta);
    return g;
}

std::size_t MtlModel::parameter_count() const noexcept {
    std::size_t n = trunk_.parameter_count();
    for (const auto& b : branches_) n += b.parameter_count();
    return n;
}

std::vector<std::span<double>> MtlModel::parameter_blocks() {
    auto out = trunk_.parameter_blocks();
    for (auto& b : branches_) {
        const auto more = b.parameter_blocks();
        out.insert(out.end(), more.begin(), more.end());
    }
    return out;
}

std::vector<std::span<const double>> MtlModel::parameter_blocks() const {
    auto out = trunk_.parameter_blocks();
    for (const auto& b : branches_) {
        const auto more = b.parameter_blocks();
        out.insert(out.end(), more.begin(), more.end());
    }
    return out;
}

bool MtlModel::operator==(const MtlModel& other) const {
    return arch_ == other.arch_ && trunk_ == other.trunk_ && branches_ == other.branches_;
}

TrainConfig TrainConfig::desk() { return {300, 64, 1e-3, 1, true}; }

TrainConfig TrainConfig::paper() { return {10000, 16, 1e-6, 1, true}; }

void TrainConfig::validate() const {
    if (epochs == 0) throw std::invalid_argument("train: epochs must be positive");
    if (batch_size == 0) throw std::invalid_argument("train: batch_size must be positive");
    if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate))
        throw std::invalid_argument("train: learning_rate must be finite and non-negative");
}

Eigen::MatrixXd gather_features(const SampleView& view, std::span<const std::size_t> rows) {
    Eigen::MatrixXd x(static_cast<Eigen::Index>(view.feature_width),
                      static_cast<Eigen::Index>(rows.size()));
    for (std::size_t j = 0; j < rows.size(); ++j) {
        const auto r = view.row(rows[j]);
        x.col(static_cast<Eigen::Index>(j)) =
            Eigen::Map<const Eigen::VectorXf>(r.data(), static_cast<Eigen::Index>(r.size()))
                .cast<double>();
    }
    return x;
}

Eigen::MatrixXd gather_labels(const SampleView& view, std::span<const std::size_t> rows) {
    Eigen::MatrixXd y(static_cast<Eigen::Index>(kComponentCount),
                      static_cast<Eigen::Index>(rows.size()));
    for (std::size_t j = 0; j < rows.size(); ++j)
        for (std::size_t k = 0; k < kComponentCount; ++k)
            y(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(j)) =
                view.labels[rows[j]][k] ? 1.0 : 0.0;
    return y;
}

Evaluation evaluate(const MtlModel& model, const SampleView& view, double threshold) {
    check_view(view, model.architecture().input_width, "evaluation");
    Probabilities correct{};
    Probabilities loss_sum{};
    std::vector<std::size_t> rows;
    for (std::size_t begin = 0; begin < view.size(); begin += kEvalChunk) {
        const std::size_t end = std::min(view.size(), begin + kEvalChunk);
        rows.resize(end - begin);
        std::iota(rows.begin(), rows.end(), begin);
        const Eigen::MatrixXd probs = model.forward_batch(gather_features(view, rows));
        for (std::size_t j = 0; j < rows.size(); ++j) {
            const auto& truth = view.labels[rows[j]];
            for (std::size_t k = 0; k < kComponentCount; ++k) {
                const double p = probs(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(j));
                correct[k] += ((p > threshold) == truth[k]) ? 1.0 : 0.0;
                loss_sum[k] += bce_loss(p, truth[k] ? 1.0 : 0.0);
            }
        }
    }
    Evaluation e;
    const double n = static_cast<double>(view.size());
    for (std::size_t k = 0; k < kComponentCount; ++k) {
        e.accuracy[k] = correct[k] / n;
        e.loss[k] = loss_sum[k] / n;
    }
    return e;
}

TrainingHistory train(MtlModel& model, const SampleView& train_set,
                      const SampleView& validation_set, const TrainConfig& config,
                      const EpochCallback& on_epoch) {
    config.validate();
    const std::size_t width = model.architecture().input_width;
    check_view(train_set, width, "training");
    check_view(validation_set, width, "validation");
    if (config.batch_size > train_set.size())
        throw std::invalid_argument("train: batch_size " + std::to_string(config.batch_size) +
                                    " exceeds training set size " +
                                    std::to_string(train_set.size()));

    auto& opt = model.optimizer();
    if (opt.first_moment.size() != model.parameter_count())
        opt = AdamState(AdamConfig{}, model.parameter_count());
    opt.config.learning_rate = config.learning_rate;

    const std::size_t n = train_set.size();
    std::vector<std::size_t> order(n);
    TrainingHistory history;
    history.epochs.reserve(config.epochs);

    for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
        std::iota(order.begin(), order.end(), std::size_t{0});
        if (config.shuffle) {
            Rng rng(stream_seed(config.seed, kShuffleStream), epoch);
            for (std::size_t i = n; i-- > 1;) std::swap(order[i], order[rng.below(i + 1)]);
        }

        EpochRecord rec;
        rec.epoch = epoch;
        Probabilities correct{};
        Probabilities loss_sum{};
        Eigen::MatrixXd probs;
        for (std::size_t begin = 0; begin < n; begin += config.batch_size) {
            const std::size_t end = std::min(n, begin + config.batch_size);
            const std::span<const std::size_t> rows(order.data() + begin, end - begin);
            const Eigen::MatrixXd x = gather_features(train_set, rows);
            const Eigen::MatrixXd y = gather_labels(train_set, rows);

            const MtlGradients g = model.gradients(x, y, &probs);
            const auto params = model.parameter_blocks();
            const auto grads = g.blocks();
            adam_step(params, grads, opt);

            const double batch = static_cast<double>(rows.size());
            for (std::size_t k = 0; k < kComponentCount; ++k) {
                const auto kk = static_cast<Eigen::Index>(k);
                loss_sum[k] += g.task_loss[k] * batch;
                correct[k] += ((probs.row(kk).array() > 0.5).cast<double>() == y.row(kk).array())
                                  .cast<double>()
                                  .sum();
            }
        }

        const Evaluation val = evaluate(model, validation_set);
        for (std::size_t k = 0; k < kComponentCount; ++k) {
            rec.train_accuracy[k] = correct[k] / static_cast<double>(n);
            rec.train_loss[k] = loss_sum[k] / static_cast<double>(n);
            rec.total_loss += rec.train_loss[k];
        }
        rec.validation_accuracy = val.accuracy;
        rec.validation_loss = val.loss;
        rec.optimizer_steps = opt.step_count;
        history.epochs.push_back(rec);
        if (on_epoch) on_epoch(rec);
    }
    return history;
}

LabelVector binarize(const Probabilities& probs, double threshold) {
    LabelVector v;
    for (std::size_t k = 0; k < kComponentCount; ++k) v.set(k, probs[k] > threshold);
    return v;
}

LabelVector predict(const MtlModel& model, std::span<const double> features, double threshold) {
    return binarize(model.forward(features), threshold);
}

std::vector<LabelVector> predict_all(const MtlModel& model, const SampleView& view,
                                     double threshold) {
    check_view(view, model.architecture().input_width, "prediction");
    std::vector<LabelVector> out;
    out.reserve(view.size());
    std::vector<std::size_t> rows;
    for (std::size_t begin = 0; begin < view.size(); begin += kEvalChunk) {
        const std::size_t end = std::min(view.size(), begin + kEvalChunk);
        rows.resize(end - begin);
        std::iota(rows.begin(), rows.end(), begin);
        const Eigen::MatrixXd probs = model.forward_batch(gather_features(view, rows));
        for (Eigen::Index j = 0; j < probs.cols(); ++j) {
            Probabilities p{};
            for (std::size_t k = 0; k < kComponentCount; ++k)
                p[k] = probs(static_cast<Eigen::Index>(k), j);
            out.push_back(binarize(p, threshold));
        }
    }
    return out;
}

std::uint64_t training_cost_estimate(std::uint64_t epochs, std::uint64_t samples,
                                     const MtlArchitecture& arch) {
    const auto chain = branch_chain(arch);
    std::uint64_t branch = 0;
    for (std::size_t i = 0; i + 1 < chain.size(); ++i) branch += chain[i] * chain[i + 1];
    const std::uint64_t per_sample =
        arch.input_width * arch.trunk_width + arch.branch_count * branch;
    return epochs * samples * per_sample;
}

void save_checkpoint(const MtlModel& model, const std::filesystem::path& path) {
    const auto& opt = model.optimizer();
    nlohmann::json header = {
        {"architecture", arch_json(model.architecture())},
        {"init_seed", model.init_seed()},
        {"parameter_count", model.parameter_count()},
        {"adam",
         {{"learning_rate", opt.config.learning_rate},
          {"beta1", opt.config.beta1},
          {"beta2", opt.config.beta2},
          {"epsilon", opt.config.epsilon}}},
        {"provenance", nlohmann::json::parse(model.provenance())},
    };
    const std::string text = header.dump();

    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
    LeWriter w(os);
    w.bytes(kMagic, sizeof kMagic);
    w.u32(kCheckpointVersion);
    w.u32(static_cast<std::uint32_t>(text.size()));
    w.bytes(text.data(), text.size());

    w.u64(model.parameter_count());
    for (const auto& block : model.parameter_blocks()) w.f64_array(block);

    w.u64(opt.step_count);
    w.u64(opt.first_moment.size());
    w.f64_array(opt.first_moment);
    w.f64_array(opt.second_moment);
    os.close();
    if (!os) throw std::runtime_error("failed to finish writing '" + path.string() + "'");
}

MtlModel load_checkpoint(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open '" + path.string() + "'");
    LeReader r(is);

    char magic[4];
    r.bytes(magic, sizeof magic);
    if (!std::equal(magic, magic + 4, kMagic)) throw FormatError("bad checkpoint magic", 0);
    if (const auto v = r.u32(); v != kCheckpointVersion)
        throw FormatError("unsupported checkpoint version " + std::to_string(v), 4);
    const auto header_len = r.u32();
    if (header_len > (1U << 24)) throw FormatError("implausible header length", 8);
    std::string text(header_len, '\0');
    const auto header_at = r.offset();
    r.bytes(text.data(), text.size());

    nlohmann::json header;
    MtlArchitecture arch;
    std::uint64_t seed = 0;
    AdamConfig adam;
    try {
        header = nlohmann::json::parse(text);
        arch = arch_from_json(header.at("architecture"));
        arch.validate();
        seed = header.at("init_seed").get<std::uint64_t>();
        const auto& a = header.at("adam");
        adam = {a.at("learning_rate").get<double>(), a.at("beta1").get<double>(),
                a.at("beta2").get<double>(), a.at("epsilon").get<double>()};
    } catch (const std::exception& e) {
        throw FormatError(std::string("bad checkpoint header: ") + e.what(), header_at);
    }

    const auto count_at = r.offset();
    const auto count = r.u64();
    if (count != arch.parameter_count())
        throw FormatError("checkpoint stores " + std::to_string(count) +
                              " parameters, architecture needs " +
                              std::to_string(arch.parameter_count()),
                          count_at);

    MtlModel model = MtlModel::build(arch, seed);
    for (auto block : model.parameter_blocks()) r.f64_array(block);

    auto& opt = model.optimizer();
    opt.config = adam;
    opt.step_count = r.u64();
    const auto moments_at = r.offset();
    const auto moments = r.u64();
    if (moments != 0 && moments != count)
        throw FormatError("optimizer state has " + std::to_string(moments) +
                              " moments for " + std::to_string(count) + " parameters",
                          moments_at);
    opt.first_moment.resize(moments);
    opt.second_moment.resize(moments);
    r.f64_array(opt.first_moment);
    r.f64_array(opt.second_moment);
    if (is.peek() != std::ifstream::traits_type::eof())
        throw FormatError("trailing bytes after optimizer state", r.offset());

    model.set_provenance(header.contains("provenance") ? header["provenance"].dump() : "{}");
    return model;
}

MtlModel load_checkpoint(const std::filesystem::path& path, const MtlArchitecture& expected) {
    MtlModel model = load_checkpoint(path);
    const auto& found = model.architecture();
    if (found.input_width != expected.input_width)
        throw FormatError("checkpoint input_width mismatch: expected " +
                              std::to_string(expected.input_width) + ", found " +
                              std::to_string(found.input_width),
                          12);
    if (!(found == expected))
        throw FormatError("checkpoint architecture differs from the expected one", 0);
    return model;
}

}  // namespace rfdiag
