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

#include "rfdiag/impairments.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace rfdiag {
namespace {

constexpr double deg_to_rad(double deg) { return deg * (std::numbers::pi / 180.0); }

// Multiplication by (c, s) written out so that (1, 0) leaves samples bit-exact.
inline ComplexSample rotate(ComplexSample x, double c, double s) {
    return {x.real() * c - x.imag() * s, x.real() * s + x.imag() * c};
}

}  // namespace

void ImpairmentParams::validate() const {
    const double fields[] = {i_gain,         q_gain,   quad_offset_deg, phase_noise_deg,
                             freq_offset_hz, i_offset, q_offset};
    for (double v : fields)
        if (!std::isfinite(v)) throw std::invalid_argument("impairment parameters must be finite");
    if (!(i_gain > 0.0) || !(q_gain > 0.0))
        throw std::invalid_argument("impairment gains must be positive (I_g=" +
                                    std::to_string(i_gain) + ", Q_g=" + std::to_string(q_gain) +
                                    ")");
}

bool ImpairmentParams::quad_offset_realistic() const noexcept {
    return std::abs(quad_offset_deg) < 90.0;
}

ComplexFrame apply_gain_imbalance_qo(const ComplexFrame& frame, double i_gain, double q_gain,
                                     double quad_offset_deg) {
    if (!(i_gain > 0.0) || !(q_gain > 0.0))
        throw std::invalid_argument("apply_gain_imbalance_qo: gains must be positive");

    const double psi = deg_to_rad(quad_offset_deg);
    const double sin_psi = std::sin(psi);
    const double cos_psi = std::cos(psi);

    ComplexFrame out{.samples = {}, .sample_rate_hz = frame.sample_rate_hz};
    out.samples.reserve(frame.size());
    for (const auto& x : frame.samples) {
        const double q = q_gain * x.imag();
        out.samples.emplace_back(i_gain * x.real() + q * sin_psi, q * cos_psi);
    }
    return out;
}

ComplexFrame apply_phase_noise(const ComplexFrame& frame, double phase_noise_deg) {
    const double phi = deg_to_rad(phase_noise_deg);
    const double c = std::cos(phi);
    const double s = std::sin(phi);

    ComplexFrame out{.samples = {}, .sample_rate_hz = frame.sample_rate_hz};
    out.samples.reserve(frame.size());
    for (const auto& x : frame.samples) out.samples.push_back(rotate(x, c, s));
    return out;
}

ComplexFrame apply_frequency_offset(const ComplexFrame& frame, double freq_offset_hz) {
    if (!(frame.sample_rate_hz > 0.0))
        throw std::invalid_argument("apply_frequency_offset: sample rate must be positive");

    ComplexFrame out{.samples = {}, .sample_rate_hz = frame.sample_rate_hz};
    out.samples.reserve(frame.size());
    const double cycles_per_sample = freq_offset_hz / frame.sample_rate_hz;
    for (std::size_t n = 0; n < frame.size(); ++n) {
        // Reduce to a fraction of a turn before scaling by 2 pi to keep the
        // phase accurate for long frames.
        const double cycles = cycles_per_sample * static_cast<double>(n);
        const double phase = 2.0 * std::numbers::pi * (cycles - std::floor(cycles));
        out.samples.push_back(rotate(frame.samples[n], std::cos(phase), std::sin(phase)));
    }
    return out;
}

ComplexFrame apply_iq_offset(const ComplexFrame& frame, double i_offset, double q_offset) {
    ComplexFrame out{.samples = {}, .sample_rate_hz = frame.sample_rate_hz};
    out.samples.reserve(frame.size());
    for (const auto& x : frame.samples)
        out.samples.emplace_back(x.real() + i_offset, x.imag() + q_offset);
    return out;
}

ComplexFrame apply_chain(const ComplexFrame& frame, const ImpairmentParams& params) {
    params.validate();
    auto x = apply_gain_imbalance_qo(frame, params.i_gain, params.q_gain, params.quad_offset_deg);
    x = apply_phase_noise(x, params.phase_noise_deg);
    x = apply_frequency_offset(x, params.freq_offset_hz);
    return apply_iq_offset(x, params.i_offset, params.q_offset);
}

double gain_imbalance_percent(double i_gain, double q_gain) {
    if (q_gain == 0.0) throw std::domain_error("gain_imbalance_percent: Q gain is zero");
    return (i_gain / q_gain - 1.0) * 100.0;
}

}  // namespace rfdiag
