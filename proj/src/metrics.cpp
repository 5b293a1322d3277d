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

#include "rfdiag/metrics.hpp"

#include <cstdio>
#include <stdexcept>

namespace rfdiag {

ComponentConfusion confusion(std::span<const LabelVector> predictions,
                             std::span<const LabelVector> truths) {
    if (predictions.size() != truths.size())
        throw std::invalid_argument("confusion: " + std::to_string(predictions.size()) +
                                    " predictions for " + std::to_string(truths.size()) +
                                    " truths");
    if (predictions.empty()) throw std::invalid_argument("confusion: no samples");

    ComponentConfusion out{};
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        for (std::size_t k = 0; k < kComponentCount; ++k) {
            const bool p = predictions[i][k];
            const bool t = truths[i][k];
            auto& c = out[k];
            if (p && t) ++c.tp;
            else if (!p && !t) ++c.tn;
            else if (p) ++c.fp;
            else ++c.fn;
        }
    }
    return out;
}

Metrics compute_metrics(const ConfusionCounts& c) {
    const auto n = c.total();
    if (n == 0) throw std::invalid_argument("compute_metrics: empty confusion table");

    Metrics m;
    m.accuracy = static_cast<double>(c.tp + c.tn) / static_cast<double>(n);
    if (c.tp + c.fp > 0) m.precision = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp);
    if (c.tp + c.fn > 0) m.recall = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
    if (m.precision && m.recall) {
        const double sum = *m.precision + *m.recall;
        // Both zero only when tp == 0; the harmonic mean is then 0.
        m.f1 = sum > 0.0 ? 2.0 * *m.precision * *m.recall / sum : 0.0;
    }
    return m;
}

MetricsReport make_report(std::span<const LabelVector> predictions,
                          std::span<const LabelVector> truths, QualityTier tier) {
    const auto counts = confusion(predictions, truths);
    MetricsReport r;
    r.tier = tier;
    for (std::size_t k = 0; k < kComponentCount; ++k) r.per_component[k] = compute_metrics(counts[k]);
    return r;
}

std::string format_metric(const std::optional<double>& value) {
    if (!value) return kUndefinedMetric;
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", *value);
    return buf;
}

void write_metrics_csv(std::ostream& os, const MetricsReport& report) {
    os << "tier,component,accuracy,precision,recall,f1\n";
    for (const auto c : kReportOrder) {
        const auto& m = report[c];
        os << to_string(report.tier) << ',' << to_string(c) << ',' << format_metric(m.accuracy)
           << ',' << format_metric(m.precision) << ',' << format_metric(m.recall) << ','
           << format_metric(m.f1) << '\n';
    }
}

}  // namespace rfdiag
