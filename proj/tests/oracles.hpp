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

// Reference implementations shared by the unit and acceptance tests. They are
// written from the model definitions, not from the library code.

#ifndef RFDIAG_TESTS_ORACLES_HPP
#define RFDIAG_TESTS_ORACLES_HPP

#include <cmath>
#include <complex>
#include <numbers>

#include "rfdiag/dataset.hpp"
#include "rfdiag/impairments.hpp"
#include "rfdiag/waveform.hpp"

namespace rfdiag::oracle {

inline constexpr double kPi = std::numbers::pi;

// Oracle for the filter/phase-shifter stage: synthesise the carrier-domain
// signal cos(wt) I_g re + sin(wt + psi) Q_g im over one carrier period and
// recover I/Q by correlating with 2cos(wt) and 2sin(wt) (midpoint rule,
// exact for trigonometric polynomials of this degree).
inline ComplexSample passband_projection(ComplexSample x, double ig, double qg, double psi_deg) {
    const int steps = 64;
    const double psi = psi_deg * kPi / 180.0;
    double i_acc = 0.0;
    double q_acc = 0.0;
    for (int k = 0; k < steps; ++k) {
        const double wt = 2.0 * kPi * (k + 0.5) / steps;
        const double r = std::cos(wt) * ig * x.real() + std::sin(wt + psi) * qg * x.imag();
        i_acc += 2.0 * r * std::cos(wt);
        q_acc += 2.0 * r * std::sin(wt);
    }
    return {i_acc / steps, q_acc / steps};
}

// Independent sequential pipeline using std::polar on raw samples.
inline ComplexFrame sequential_chain(const ComplexFrame& in, const ImpairmentParams& p) {
    ComplexFrame out = in;
    for (std::size_t n = 0; n < out.size(); ++n) {
        ComplexSample x = passband_projection(in.samples[n], p.i_gain, p.q_gain, p.quad_offset_deg);
        x *= std::polar(1.0, p.phase_noise_deg * kPi / 180.0);
        x *= std::polar(1.0, 2.0 * kPi * p.freq_offset_hz * static_cast<double>(n) / in.sample_rate_hz);
        out.samples[n] = x + ComplexSample(p.i_offset, p.q_offset);
    }
    return out;
}

// Brute-force label rule written directly from the threshold table.
inline LabelVector label(const ImpairmentParams& p, QualityTier tier) {
    static const double table[3][5] = {
        {0.2, 20, 20, 20, 0.1}, {0.4, 40, 40, 40, 0.2}, {0.6, 60, 60, 60, 0.3}};
    const auto& t = table[static_cast<int>(tier)];
    const double g = p.i_gain / p.q_gain - 1.0;
    LabelVector v;
    v.bits[0] = g > t[0];
    v.bits[1] = p.quad_offset_deg < -t[1] || p.quad_offset_deg > t[1];
    v.bits[2] = p.phase_noise_deg > t[2] || p.freq_offset_hz > t[3];
    v.bits[3] = p.i_offset < -t[4] || p.i_offset > t[4] || p.q_offset < -t[4] || p.q_offset > t[4];
    return v;
}

}  // namespace rfdiag::oracle

#endif  // RFDIAG_TESTS_ORACLES_HPP
