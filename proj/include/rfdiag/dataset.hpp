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

#ifndef RFDIAG_DATASET_HPP
#define RFDIAG_DATASET_HPP

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rfdiag/impairments.hpp"
#include "rfdiag/waveform.hpp"

namespace rfdiag {

enum class QualityTier : std::uint32_t { High = 0, Middle = 1, Low = 2 };

std::string_view to_string(QualityTier tier);
/// Accepts "high", "middle", "low" (case-insensitive). Throws std::invalid_argument.
QualityTier parse_tier(std::string_view name);

/// Exceedance thresholds for one device-quality tier. A component is
/// labeled distorted when its impairment magnitude is strictly above the
/// threshold.
struct Thresholds {
    double gi;        // gain imbalance g = I_g / Q_g - 1
    double qo_deg;    // |quadrature offset|
    double pn_deg;    // phase rotation
    double fo_hz;     // frequency offset
    double iq_offset; // |I_o| or |Q_o|
};

Thresholds thresholds_for(QualityTier tier);

/// Hardware components identified by the classifier, in network output order.
enum class Component : std::size_t { Filter = 0, Ps = 1, Lo = 2, Mixer = 3 };
inline constexpr std::size_t kComponentCount = 4;
inline constexpr std::array<Component, kComponentCount> kComponents = {
    Component::Filter, Component::Ps, Component::Lo, Component::Mixer};

std::string_view to_string(Component c);

/// One bit per component: 1 = distorted.
struct LabelVector {
    std::array<std::uint8_t, kComponentCount> bits{};

    LabelVector() = default;
    LabelVector(bool filter, bool ps, bool lo, bool mixer)
        : bits{std::uint8_t(filter), std::uint8_t(ps), std::uint8_t(lo), std::uint8_t(mixer)} {}

    bool operator[](Component c) const { return bits[static_cast<std::size_t>(c)] != 0; }
    bool operator[](std::size_t i) const { return bits[i] != 0; }
    void set(std::size_t i, bool v) { bits[i] = v ? 1 : 0; }

    bool operator==(const LabelVector&) const = default;
};

/// Range-draw for sample `index`. Each index owns an independent random
/// stream derived from (master_seed, index), so samples can be generated in
/// any order or in parallel with identical results.
///   g ~ U[0,1] with I_g = 1 + g, Q_g = 1;  psi ~ U[-90,90] deg;
///   phi ~ U[0,90] deg;  f_o ~ U[0,100] Hz;  I_o, Q_o ~ U[-0.5,0.5].
ImpairmentParams draw_params(std::uint64_t index, std::uint64_t master_seed);

LabelVector label(const ImpairmentParams& params, QualityTier tier);

struct SplitSizes {
    std::size_t train = 40000;
    std::size_t validation = 10000;
    std::size_t test = 10000;

    std::size_t total() const noexcept { return train + validation + test; }
    bool operator==(const SplitSizes&) const = default;
};

struct DatasetConfig {
    QualityTier tier = QualityTier::High;
    std::size_t total_samples = 60000;
    SplitSizes split{};
    std::uint64_t master_seed = 42;
    WaveformConfig waveform{};

    /// Throws std::invalid_argument on an inconsistent configuration.
    void validate() const;

    bool operator==(const DatasetConfig&) const = default;
};

enum class Split { Train, Validation, Test };
std::string_view to_string(Split s);
Split parse_split(std::string_view name);

/// Non-owning row-major view over a contiguous run of samples.
struct SampleView {
    std::size_t feature_width = 0;
    std::span<const float> features;
    std::span<const LabelVector> labels;

    std::size_t size() const noexcept { return labels.size(); }
    bool empty() const noexcept { return labels.empty(); }
    std::span<const float> row(std::size_t i) const {
        return features.subspan(i * feature_width, feature_width);
    }
};

/// Samples are stored in index order; the train, validation and test splits
/// are consecutive index ranges in that order.
struct Dataset {
    DatasetConfig config;
    std::size_t feature_width = 0;
    std::vector<float> features;  // size() * feature_width, row-major
    std::vector<LabelVector> labels;
    std::vector<ImpairmentParams> params;

    std::size_t size() const noexcept { return labels.size(); }
    SampleView all() const;
    SampleView view(Split split) const;

    bool operator==(const Dataset&) const = default;
};

/// Fans out across `threads` workers; the result does not depend on the
/// thread count.
Dataset generate_dataset(const DatasetConfig& config, unsigned threads = 1);

inline constexpr std::uint32_t kDatasetFormatVersion = 1;
inline constexpr std::uint32_t kLabelWidth = kComponentCount;

/// Writes the binary dataset to `path` and a human-readable JSON copy of the
/// configuration to `path` + ".json".
void write_dataset(const Dataset& dataset, const std::filesystem::path& path);

/// Throws FormatError (with byte offset) on bad magic, version, header
/// fields, or a length that disagrees with the header.
Dataset read_dataset(const std::filesystem::path& path);

std::filesystem::path sidecar_path(const std::filesystem::path& dataset_path);

}  // namespace rfdiag

#endif  // RFDIAG_DATASET_HPP
