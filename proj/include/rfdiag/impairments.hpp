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

#ifndef RFDIAG_IMPAIRMENTS_HPP
#define RFDIAG_IMPAIRMENTS_HPP

#include "rfdiag/waveform.hpp"

namespace rfdiag {

/// Transmit-chain impairment parameters. Angles are in degrees, the
/// frequency offset in Hz. The defaults are the identity (no distortion).
struct ImpairmentParams {
    double i_gain = 1.0;           // I branch gain
    double q_gain = 1.0;           // Q branch gain
    double quad_offset_deg = 0.0;  // I/Q branch angle error
    double phase_noise_deg = 0.0;  // constant LO phase rotation
    double freq_offset_hz = 0.0;
    double i_offset = 0.0;
    double q_offset = 0.0;

    /// Throws std::invalid_argument unless all fields are finite and both gains positive.
    void validate() const;

    /// |quad_offset_deg| < 90. Values outside are accepted but collapse the constellation.
    bool quad_offset_realistic() const noexcept;

    bool operator==(const ImpairmentParams&) const = default;
};

// Filter / phase-shifter stage. Baseband projection of the carrier model
//   cos(wt) I_g Re{x} + sin(wt + psi) Q_g Im{x}
// onto the cos/sin basis, which gives
//   out = I_g re + Q_g im sin(psi) + j Q_g im cos(psi).
// The +sin convention follows the carrier model as written; at psi = 0 this is
// the plain per-branch gain I_g re + j Q_g im.
ComplexFrame apply_gain_imbalance_qo(const ComplexFrame& frame, double i_gain, double q_gain,
                                     double quad_offset_deg);

/// Constant LO phase rotation: every sample times e^{j phi}.
ComplexFrame apply_phase_noise(const ComplexFrame& frame, double phase_noise_deg);

/// Sample n times e^{j 2 pi f_o n / f_s}.
ComplexFrame apply_frequency_offset(const ComplexFrame& frame, double freq_offset_hz);

/// Mixer DC leakage: every sample plus I_o + j Q_o.
ComplexFrame apply_iq_offset(const ComplexFrame& frame, double i_offset, double q_offset);

/// Gain/QO, then phase noise, then frequency offset, then I/Q offset.
ComplexFrame apply_chain(const ComplexFrame& frame, const ImpairmentParams& params);

/// (I_g / Q_g - 1) * 100. Throws std::domain_error when q_gain is zero.
double gain_imbalance_percent(double i_gain, double q_gain);

}  // namespace rfdiag

#endif  // RFDIAG_IMPAIRMENTS_HPP
