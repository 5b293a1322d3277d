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

#include "rfdiag/waveform.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "rfdiag/random.hpp"

namespace rfdiag {

void WaveformConfig::validate() const {
    if (symbol_count == 0) throw std::invalid_argument("waveform: symbol_count must be positive");
    if (oversample_factor == 0)
        throw std::invalid_argument("waveform: oversample_factor must be positive");
    if (!(sample_rate_hz > 0.0) || !std::isfinite(sample_rate_hz))
        throw std::invalid_argument("waveform: sample_rate_hz must be positive and finite");
}

std::vector<ComplexSample> generate_symbols(std::size_t count, std::uint64_t seed) {
    if (count == 0) throw std::invalid_argument("generate_symbols: count must be positive");

    constexpr double a = std::numbers::sqrt2 / 2.0;
    Rng rng(seed);
    std::vector<ComplexSample> symbols;
    symbols.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        const auto pair = rng.bits() >> 62;  // b1 b0
        const bool b0 = (pair & 1U) != 0;
        const bool b1 = (pair & 2U) != 0;
        symbols.emplace_back(b0 ? -a : a, b1 ? -a : a);
    }
    return symbols;
}

ComplexFrame oversample(std::span<const ComplexSample> symbols, std::size_t factor,
                        double sample_rate_hz) {
    if (symbols.empty()) throw std::invalid_argument("oversample: empty symbol sequence");
    if (factor == 0) throw std::invalid_argument("oversample: factor must be >= 1");

    ComplexFrame frame;
    frame.sample_rate_hz = sample_rate_hz;
    frame.samples.reserve(symbols.size() * factor);
    for (const auto& s : symbols) frame.samples.insert(frame.samples.end(), factor, s);
    return frame;
}

ComplexFrame canonical_frame(const WaveformConfig& config) {
    config.validate();
    const auto symbols = generate_symbols(config.symbol_count, config.seed);
    return oversample(symbols, config.oversample_factor, config.sample_rate_hz);
}

std::vector<double> frame_to_features(const ComplexFrame& frame) {
    if (frame.empty()) throw std::invalid_argument("frame_to_features: empty frame");
    std::vector<double> out;
    out.reserve(2 * frame.size());
    for (const auto& s : frame.samples) {
        out.push_back(s.real());
        out.push_back(s.imag());
    }
    return out;
}

ComplexFrame features_to_frame(std::span<const double> features, double sample_rate_hz) {
    if (features.empty() || features.size() % 2 != 0)
        throw std::invalid_argument("features_to_frame: need a non-empty even-length vector, got " +
                                    std::to_string(features.size()));
    ComplexFrame frame;
    frame.sample_rate_hz = sample_rate_hz;
    frame.samples.reserve(features.size() / 2);
    for (std::size_t i = 0; i < features.size(); i += 2)
        frame.samples.emplace_back(features[i], features[i + 1]);
    return frame;
}

}  // namespace rfdiag
