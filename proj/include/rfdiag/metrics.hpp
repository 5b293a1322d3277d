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

#ifndef RFDIAG_METRICS_HPP
#define RFDIAG_METRICS_HPP

#include <array>
#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <string>

#include "rfdiag/dataset.hpp"

namespace rfdiag {

struct ConfusionCounts {
    std::uint64_t tp = 0;
    std::uint64_t tn = 0;
    std::uint64_t fp = 0;
    std::uint64_t fn = 0;

    std::uint64_t total() const noexcept { return tp + tn + fp + fn; }
    bool operator==(const ConfusionCounts&) const = default;
};

using ComponentConfusion = std::array<ConfusionCounts, kComponentCount>;

/// Per-component tallies. Throws std::invalid_argument when the sequences
/// are empty or differ in length.
ComponentConfusion confusion(std::span<const LabelVector> predictions,
                             std::span<const LabelVector> truths);

/// Precision, recall and F1 are empty when their denominator is zero.
struct Metrics {
    double accuracy = 0.0;
    std::optional<double> precision;
    std::optional<double> recall;
    std::optional<double> f1;
};

/// Throws std::invalid_argument when the table is empty.
Metrics compute_metrics(const ConfusionCounts& counts);

struct MetricsReport {
    QualityTier tier = QualityTier::High;
    std::array<Metrics, kComponentCount> per_component{};  // indexed by Component

    const Metrics& operator[](Component c) const {
        return per_component[static_cast<std::size_t>(c)];
    }
};

MetricsReport make_report(std::span<const LabelVector> predictions,
                          std::span<const LabelVector> truths, QualityTier tier);

inline constexpr const char* kUndefinedMetric = "undefined";

/// Three decimals, or "undefined".
std::string format_metric(const std::optional<double>& value);

/// Row order of the results table: filter, mixer, lo, ps.
inline constexpr std::array<Component, kComponentCount> kReportOrder = {
    Component::Filter, Component::Mixer, Component::Lo, Component::Ps};

/// Header `tier,component,accuracy,precision,recall,f1` plus one row per component.
void write_metrics_csv(std::ostream& os, const MetricsReport& report);

}  // namespace rfdiag

#endif  // RFDIAG_METRICS_HPP
