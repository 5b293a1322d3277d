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

#ifndef RFDIAG_WAVEFORM_HPP
#define RFDIAG_WAVEFORM_HPP

#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace rfdiag {

using ComplexSample = std::complex<double>;

inline constexpr double kDefaultSampleRateHz = 2000.0;

/// A block of complex baseband samples x(n) at a fixed sample rate.
struct ComplexFrame {
    std::vector<ComplexSample> samples;
    double sample_rate_hz = kDefaultSampleRateHz;

    std::size_t size() const noexcept { return samples.size(); }
    bool empty() const noexcept { return samples.empty(); }
};

/// Parameters of the shared transmit frame. The defaults give 500 QPSK
/// symbols at 4 samples per symbol, i.e. 2000 complex samples spanning one
/// second, which flatten to 4000 interleaved I/Q features.
struct WaveformConfig {
    std::size_t symbol_count = 500;
    std::size_t oversample_factor = 4;
    std::uint64_t seed = 1;
    double sample_rate_hz = kDefaultSampleRateHz;

    std::size_t frame_length() const noexcept { return symbol_count * oversample_factor; }
    std::size_t feature_width() const noexcept { return 2 * frame_length(); }

    /// Throws std::invalid_argument on zero counts or a non-positive rate.
    void validate() const;

    bool operator==(const WaveformConfig&) const = default;
};

/// Draws `count` Gray-mapped unit-energy QPSK symbols. Bit pairs map as
/// 00 -> (+1+j)/sqrt2, 01 -> (-1+j)/sqrt2, 11 -> (-1-j)/sqrt2, 10 -> (+1-j)/sqrt2.
std::vector<ComplexSample> generate_symbols(std::size_t count, std::uint64_t seed);

/// Rectangular-pulse oversampling: every symbol is repeated `factor` times.
ComplexFrame oversample(std::span<const ComplexSample> symbols, std::size_t factor,
                        double sample_rate_hz = kDefaultSampleRateHz);

/// The clean frame every dataset sample is derived from.
ComplexFrame canonical_frame(const WaveformConfig& config);

/// Interleaved layout [re0, im0, re1, im1, ...].
std::vector<double> frame_to_features(const ComplexFrame& frame);

ComplexFrame features_to_frame(std::span<const double> features,
                               double sample_rate_hz = kDefaultSampleRateHz);

}  // namespace rfdiag

#endif  // RFDIAG_WAVEFORM_HPP
